#include "polyls/convergence.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace polyls {

double fit_slope(const std::vector<double>& h, const std::vector<double>& error)
{
    if (h.size() != error.size()) throw std::invalid_argument("fit_slope: size mismatch");
    if (h.size() < 3) throw std::invalid_argument("fit_slope: at least 3 (h, error) pairs required");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] < h[i - 1])) throw std::invalid_argument("fit_slope: h must be strictly decreasing");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(std::max(error[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SlopeReport> convergence_report(const std::vector<RunRecord>& records)
{
    std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) groups[{r.benchmark, r.scheme}].push_back(&r);

    std::vector<SlopeReport> out;
    for (const auto& [key, rs] : groups) {
        SlopeReport rep;
        rep.benchmark = key.first;
        rep.scheme = key.second;
        std::vector<double> h, l2, h1;
        for (const RunRecord* r : rs) {
            h.push_back(r->h);
            l2.push_back(r->l2);
            h1.push_back(r->h1);
        }
        rep.l2_slope = fit_slope(h, l2);
        rep.h1_slope = fit_slope(h, h1);
        for (std::size_t i = 1; i < l2.size(); ++i)
            if (l2[i] > l2[i - 1] || h1[i] > h1[i - 1]) rep.monotone = false;
        out.push_back(std::move(rep));
    }
    return out;
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.precision(17);
    os << "benchmark,scheme,level,n_elements,n_dofs,h,l2,h1,energy,interior_points,"
          "stiffness_seconds\n";
    for (const RunRecord& r : records)
        os << r.benchmark << "," << r.scheme << "," << r.level << "," << r.n_elements << ","
           << r.n_dofs << "," << r.h << "," << r.l2 << "," << r.h1 << "," << r.energy << ","
           << r.interior_points << "," << r.stiffness_seconds << "\n";
}

std::vector<RunRecord> read_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv '" + path + "'");
    std::vector<RunRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        RunRecord r;
        auto next = [&]() {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("malformed csv row");
            return tok;
        };
        r.benchmark = next();
        r.scheme = next();
        r.level = std::stoi(next());
        r.n_elements = std::stoi(next());
        r.n_dofs = std::stoi(next());
        r.h = std::stod(next());
        r.l2 = std::stod(next());
        r.h1 = std::stod(next());
        r.energy = std::stod(next());
        r.interior_points = std::stol(next());
        r.stiffness_seconds = std::stod(next());
        out.push_back(std::move(r));
    }
    return out;
}

void write_plot_data(const std::vector<RunRecord>& records, const std::string& path)
{
    std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) groups[{r.benchmark, r.scheme}].push_back(&r);

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.precision(17);
    for (const auto& [key, rs] : groups) {
        os << "# " << key.first << " " << key.second << "\n";
        os << "# h l2 h1 energy\n";
        for (const RunRecord* r : rs)
            os << r->h << " " << r->l2 << " " << r->h1 << " " << r->energy << "\n";
        os << "\n\n";
    }
}

} // namespace polyls
