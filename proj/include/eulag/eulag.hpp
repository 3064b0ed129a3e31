#pragma once

#include "eulag/errors.hpp"
#include "eulag/harness.hpp"
#include "eulag/io.hpp"
#include "eulag/linalg.hpp"
#include "eulag/objective.hpp"
#include "eulag/plot.hpp"
#include "eulag/schemes.hpp"
#include "eulag/stability.hpp"
