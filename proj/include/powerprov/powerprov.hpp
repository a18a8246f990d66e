#ifndef POWERPROV_POWERPROV_HPP
#define POWERPROV_POWERPROV_HPP

// Core library. JSON helpers (io.hpp) and the command-line layer (cli.hpp)
// additionally need the vendored single-header dependencies.

#include "powerprov/cost.hpp"
#include "powerprov/engine.hpp"
#include "powerprov/error.hpp"
#include "powerprov/numeric.hpp"
#include "powerprov/offline.hpp"
#include "powerprov/ratio.hpp"
#include "powerprov/rng.hpp"
#include "powerprov/segments.hpp"
#include "powerprov/trace.hpp"

#endif // POWERPROV_POWERPROV_HPP
