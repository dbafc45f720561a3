#pragma once

#include "orlicz/bochner.hpp"
#include "orlicz/config.hpp"
#include "orlicz/cutoff.hpp"
#include "orlicz/degiorgi.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/field_io.hpp"
#include "orlicz/fields.hpp"
#include "orlicz/matrix.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/solvers.hpp"
#include "orlicz/tensor_maps.hpp"
