#pragma once

// Umbrella header for defsieve. Users should generally include only this file.

#include <defsieve/arith.hpp>
#include <defsieve/errors.hpp>
#include <defsieve/galois.hpp>
#include <defsieve/io.hpp>
#include <defsieve/newform.hpp>
#include <defsieve/qseries.hpp>
#include <defsieve/sieve.hpp>
