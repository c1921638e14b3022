#include "otacomm/csv.hpp"

#include "otacomm/errors.hpp"

#include <cstdio>
#include <fstream>

namespace otacomm {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

void write_waveform_csv(const std::filesystem::path& path, const Waveform& wf) {
    auto out = open_out(path);
    out << "t,v\n";
    for (std::size_t i = 0; i < wf.size(); ++i) {
        out << format_double(wf.time_at(i)) << ',' << format_double(wf[i]) << '\n';
    }
    finish(out, path);
}

void write_transfer_csv(const std::filesystem::path& path, const TransferCurve& curve) {
    auto out = open_out(path);
    out << "v_in,v_out\n";
    for (const auto& [vin, vout] : curve.points) {
        out << format_double(vin) << ',' << format_double(vout) << '\n';
    }
    finish(out, path);
}

void write_step_stats_csv(const std::filesystem::path& path, const StepStats& stats) {
    auto out = open_out(path);
    out << "mean_step,min_step,max_step,count\n";
    out << format_double(stats.mean_step) << ',' << format_double(stats.min_step) << ','
        << format_double(stats.max_step) << ',' << stats.count << '\n';
    finish(out, path);
}

} // namespace otacomm
