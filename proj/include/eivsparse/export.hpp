#pragma once
#include <eivsparse/cv.hpp>
#include <eivsparse/pursuit.hpp>
#include <eivsparse/variance.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eivsparse {

// Exported files number predictors from 1 in column order. Doubles are
// written with 17 significant digits so values round-trip.

/// step,lambda,l1_norm,rss,uncertainty,nonzeros,coefficients
/// where coefficients is "j:value" pairs separated by spaces.
void write_path_csv(std::ostream& out, const SolutionPath& path);

std::string path_to_json(const SolutionPath& path, const std::vector<std::string>& names = {});

/// step,msep,se,uncertainty,nonzeros
void write_cv_curves_csv(std::ostream& out, const CvResult& res);

std::string cv_result_to_json(const CvResult& res, const std::vector<std::string>& names = {});

/// variable,s_delta_sq,s_nu_sq,signal_to_noise (plus the response row when given).
void write_anova_csv(std::ostream& out, const std::vector<std::string>& names,
                     const std::vector<AnovaEstimate>& estimates,
                     const std::optional<std::pair<std::string, AnovaEstimate>>& response = std::nullopt);

} // namespace eivsparse
