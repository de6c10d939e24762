#pragma once

#include "nhmetro/dilation.hpp"
#include "nhmetro/dynamics.hpp"
#include "nhmetro/error.hpp"
#include "nhmetro/estimate.hpp"
#include "nhmetro/fisher.hpp"
#include "nhmetro/matcore.hpp"
#include "nhmetro/measure.hpp"
#include "nhmetro/models.hpp"
