#pragma once

#include "typeqal/errors.hpp"
#include "typeqal/typeexpr.hpp"
#include "typeqal/attrdb.hpp"
#include "typeqal/bundled_attrdb.hpp"
#include "typeqal/assignment.hpp"
#include "typeqal/simcore.hpp"
#include "typeqal/pysource.hpp"
#include "typeqal/stripper.hpp"
#include "typeqal/harvest.hpp"
#include "typeqal/checker.hpp"
#include "typeqal/curation.hpp"
