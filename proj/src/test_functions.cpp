#include "sirlab/test_functions.hpp"

#include <cmath>

namespace sirlab {

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

TestFunctionSuite TestFunctionSuite::standard(int dim, const std::vector<double>& centers,
                                              double bump_width, double sigmoid_sharpness) {
    if (centers.empty()) throw ConfigError("test-function suite requires at least one center");
    if (!(bump_width > 0.0) || !(sigmoid_sharpness > 0.0))
        throw ConfigError("test-function suite requires positive width and sharpness");

    TestFunctionSuite suite;
    suite.members.push_back({"const", [](const Point&) { return 1.0; }});

    for (double c : centers) {
        // product of smoothed window indicators per coordinate, peak < 1
        suite.members.push_back(
            {"sigmoid@" + std::to_string(c),
             [dim, c, bump_width, sigmoid_sharpness](const Point& x) {
                 double v = 1.0;
                 for (int k = 0; k < dim; ++k) {
                     v *= sigmoid(sigmoid_sharpness * (x[k] - (c - bump_width))) -
                          sigmoid(sigmoid_sharpness * (x[k] - (c + bump_width)));
                 }
                 return v;
             }});
        suite.members.push_back({"gauss@" + std::to_string(c), [dim, c, bump_width](const Point& x) {
                                     double d2 = 0.0;
                                     for (int k = 0; k < dim; ++k) {
                                         const double d = x[k] - c;
                                         d2 += d * d;
                                     }
                                     return std::exp(-d2 / (2.0 * bump_width * bump_width));
                                 }});
    }
    suite.validate();
    return suite;
}

void TestFunctionSuite::validate() const {
    if (members.size() < 5)
        throw ConfigError("test-function suite must contain at least 5 functions");
}

}  // namespace sirlab
