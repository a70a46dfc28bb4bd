#pragma once

// Regression of the published figures against values computed from first
// principles. Every row carries the table or passage it comes from.

#include "zlsim/report.hpp"
#include "zlsim/sysmodel.hpp"

namespace zlsim::goldens {

// `dp` is the main design point (normally the zettalith preset plus any
// overrides). The exalith and nexai rows use their presets.
report::Report golden_report(const sysmodel::DesignPoint& dp);

}  // namespace zlsim::goldens
