#pragma once

#include <iosfwd>
#include <string>

#include "lobkit/event_study.hpp"
#include "lobkit/stats.hpp"
#include "lobkit/study.hpp"

namespace lobkit {

/// Columns tau,mean,stderr,n. Before-curves carry negative tau. Lags with no
/// defined trajectory leave mean and stderr empty; stderr is also empty when
/// the bootstrap was skipped.
void write_curve_csv(std::ostream& out, const AggregateCurve& curve);

/// JSON document with the run metadata and the curve itself.
std::string curve_json(const StudyCurve& curve, const StudyConfig& cfg, const StudyResult& result);

/// Columns x,F,one_minus_F at each distinct sample value.
void write_ecdf_csv(std::ostream& out, const Ecdf& ecdf);

}  // namespace lobkit
