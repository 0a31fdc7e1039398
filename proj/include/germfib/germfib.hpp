#pragma once

#include "germfib/analysis.hpp"
#include "germfib/catalog.hpp"
#include "germfib/conditions.hpp"
#include "germfib/config.hpp"
#include "germfib/discriminant.hpp"
#include "germfib/errors.hpp"
#include "germfib/germ.hpp"
#include "germfib/germ_io.hpp"
#include "germfib/homogeneity.hpp"
#include "germfib/mixed.hpp"
#include "germfib/mvf.hpp"
#include "germfib/polynomial.hpp"
#include "germfib/report.hpp"
#include "germfib/variety.hpp"
