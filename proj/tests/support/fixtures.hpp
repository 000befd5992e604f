#pragma once

#include <vector>

namespace susci::testing {

// Five-respondent worked example: three 97.5s and two 80s.
inline const std::vector<double> kWorkedExample{97.5, 97.5, 97.5, 80.0, 80.0};

// The six distinct resample means of the worked example.
inline const std::vector<double> kWorkedExampleMeans{80.0, 83.5, 87.0, 90.5, 94.0, 97.5};

}  // namespace susci::testing
