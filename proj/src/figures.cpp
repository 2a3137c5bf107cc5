#include <polyext/figures.hpp>

#include <polyext/csv.hpp>
#include <polyext/profiles.hpp>

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace polyext {

namespace {

std::string table(const std::string &abscissa, double lo, double hi,
                  const std::vector<std::pair<std::string, std::function<double(double)>>> &curves) {
    std::ostringstream out;
    out << abscissa;
    for (const auto &[name, fn] : curves)
        out << "," << name;
    out << "\n";
    for (int i = 0; i < kFigurePoints; ++i) {
        const double x = lo + i * (hi - lo) / (kFigurePoints - 1);
        out << csv_double(x);
        for (const auto &[name, fn] : curves)
            out << "," << csv_double(fn(x));
        out << "\n";
    }
    return out.str();
}

} // namespace

std::string make_figure_csv(const std::string &figure) {
    if (figure == "phi") {
        std::vector<std::pair<std::string, std::function<double(double)>>> curves;
        for (double gamma : {0.0, 0.25, 0.5, 1.0}) {
            std::ostringstream name;
            name << "phi_gamma_" << gamma;
            ScalarProfile p = phi_gamma_profile(gamma);
            curves.emplace_back(name.str(), [p](double l) { return p.value(l); });
        }
        return table("lambda", 0.35, 4.2, curves);
    }
    if (figure == "radial") {
        std::vector<std::pair<std::string, std::function<double(double)>>> curves;
        curves.emplace_back("f", [](double l) {
            const double ll = std::log(l);
            return 3.0 * ll * ll;
        });
        for (double gamma : {0.25, 0.5}) {
            std::ostringstream name;
            name << "f_gamma_" << gamma;
            ScalarProfile p = phi_gamma_profile(gamma);
            // W~_gamma(l * I) at n = 3: 3 (phi_gamma(l) - (2 - 2 gamma) ln l)
            curves.emplace_back(name.str(), [p, gamma](double l) {
                return 3.0 * (p.value(l) - (2.0 - 2.0 * gamma) * std::log(l));
            });
        }
        return table("lambda", 0.07, 2.73, curves);
    }
    if (figure == "psi") {
        ScalarProfile psi = psi_vol_profile(2.0);
        std::vector<std::pair<std::string, std::function<double(double)>>> curves;
        curves.emplace_back("psi", [psi](double t) { return psi.value(t); });
        curves.emplace_back("log_squared", [](double t) {
            const double lt = std::log(t);
            return lt * lt;
        });
        return table("t", 0.014, 7.0, curves);
    }
    if (figure == "hull") {
        ScalarProfile well = double_well_profile();
        ScalarProfile hull = double_well_hull_profile();
        std::vector<std::pair<std::string, std::function<double(double)>>> curves;
        curves.emplace_back("well", [well](double x) { return well.value(x); });
        curves.emplace_back("hull", [hull](double x) { return hull.value(x); });
        return table("x", -1.47, 1.47, curves);
    }
    throw std::invalid_argument("make_figure_csv: unknown figure '" + figure + "'");
}

std::vector<std::string> figure_names() { return {"phi", "radial", "psi", "hull"}; }

} // namespace polyext
