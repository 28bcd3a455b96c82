#pragma once

#include "siftshadow/circle_map.hpp"
#include "siftshadow/cocycle.hpp"
#include "siftshadow/dynamics.hpp"
#include "siftshadow/errors.hpp"
#include "siftshadow/linalg.hpp"
#include "siftshadow/map_zoo.hpp"
#include "siftshadow/natural_extension.hpp"
#include "siftshadow/parallel.hpp"
#include "siftshadow/random.hpp"
#include "siftshadow/repeller.hpp"
#include "siftshadow/report.hpp"
#include "siftshadow/shadowing.hpp"
#include "siftshadow/strings.hpp"
#include "siftshadow/version.hpp"
