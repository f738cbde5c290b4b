#pragma once

#include "vacmix/amplitudes.hpp"
#include "vacmix/branches.hpp"
#include "vacmix/config.hpp"
#include "vacmix/errors.hpp"
#include "vacmix/fiber.hpp"
#include "vacmix/green.hpp"
#include "vacmix/io.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/modulation.hpp"
#include "vacmix/propagators.hpp"
#include "vacmix/quadrature.hpp"
#include "vacmix/states.hpp"
#include "vacmix/units.hpp"
