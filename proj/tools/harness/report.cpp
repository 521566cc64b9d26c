#include "report.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include <json.hpp>

#include "io.hpp"
#include "ttsvd/errors.hpp"

namespace ttsvd::harness {

namespace {

std::string param_tag(const std::string& name, double param) {
    if (name.empty() || std::isnan(param)) return "";
    char buf[48];
    std::snprintf(buf, sizeof buf, "_%s%g", name.c_str(), param);
    return buf;
}

std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_line: x values must not all coincide");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

std::vector<ScalingFit> scaling_report(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, double>;
    std::vector<Key> order;
    std::map<Key, std::map<int, std::vector<double>>> groups;
    for (const ResultRow& r : rows) {
        if (r.aggregate()) continue;
        Key key{r.experiment, r.solver, r.param_name, std::isnan(r.param) ? -1.0 : r.param};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second[r.n].push_back(r.seconds);
    }
    std::vector<ScalingFit> fits;
    for (const Key& key : order) {
        const auto& by_n = groups[key];
        if (by_n.size() < 2) continue;
        ScalingFit f;
        std::tie(f.experiment, f.solver, f.param_name, f.param) = key;
        if (f.param_name.empty()) f.param = std::nan("");
        std::vector<double> x, y;
        for (const auto& [n, times] : by_n) {
            double mean = 0.0;
            for (double t : times) mean += t;
            mean /= static_cast<double>(times.size());
            f.n.push_back(n);
            f.seconds.push_back(mean);
            x.push_back(n);
            y.push_back(mean);
        }
        const LinearFit lf = fit_line(x, y);
        f.slope = lf.slope;
        f.intercept = lf.intercept;
        f.r2 = lf.r2;
        fits.push_back(std::move(f));
    }
    return fits;
}

std::string scaling_json(const std::vector<ScalingFit>& fits, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ScalingFit& f : fits) {
        nlohmann::json j = {
            {"experiment", f.experiment}, {"solver", f.solver}, {"slope", f.slope}, {"intercept", f.intercept},
            {"r2", f.r2}, {"N", f.n}, {"seconds", f.seconds},
        };
        if (!f.param_name.empty()) j[f.param_name] = f.param;
        arr.push_back(std::move(j));
    }
    return nlohmann::json{{"scaling", arr}}.dump(indent);
}

void write_report(const std::filesystem::path& dir, const std::vector<ResultRow>& rows) {
    write_text_file(dir / "report.json", scaling_json(scaling_report(rows)) + "\n");
    std::map<std::string, std::string> files;
    for (const ResultRow& r : rows) {
        if (!r.aggregate()) continue;
        const std::string name = r.experiment + "_" + r.solver + param_tag(r.param_name, r.param) + ".tsv";
        std::string& text = files[name];
        if (text.empty()) {
            text = "N\tseconds\tseconds_std\tresidual\tresidual_std\tspectrum_error\tmax_rank_v\tsweeps\n";
        }
        text += std::to_string(r.n) + "\t" + cell(r.seconds) + "\t" + cell(r.seconds_std) + "\t" +
                cell(r.residual) + "\t" + cell(r.residual_std) + "\t" +
                cell(r.spectrum_error ? *r.spectrum_error : std::nan("")) + "\t" + cell(r.max_rank_v) + "\t" +
                cell(r.sweeps) + "\n";
    }
    for (const auto& [name, text] : files) write_text_file(dir / "plotdata" / name, text);
}

}  // namespace ttsvd::harness
