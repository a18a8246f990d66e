#ifndef POWERPROV_ENGINE_HPP
#define POWERPROV_ENGINE_HPP

#include "powerprov/engine/analytic.hpp"
#include "powerprov/engine/discrete.hpp"
#include "powerprov/engine/dispatch.hpp"
#include "powerprov/engine/lookahead.hpp"
#include "powerprov/engine/policy.hpp"
#include "powerprov/engine/result.hpp"
#include "powerprov/engine/simulate.hpp"

#endif // POWERPROV_ENGINE_HPP
