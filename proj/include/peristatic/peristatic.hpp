// Umbrella include for the peristatic library.
#pragma once

#include "peristatic/config.hpp"
#include "peristatic/core.hpp"
#include "peristatic/dense_linalg.hpp"
#include "peristatic/error_metrics.hpp"
#include "peristatic/field_io.hpp"
#include "peristatic/geometry.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"
#include "peristatic/material.hpp"
#include "peristatic/oracle.hpp"
#include "peristatic/parallel.hpp"
#include "peristatic/peri_operator.hpp"
#include "peristatic/study.hpp"
#include "peristatic/system.hpp"
#include "peristatic/weights.hpp"
