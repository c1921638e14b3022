#pragma once

#include "otacomm/metrics.hpp"
#include "otacomm/waveform.hpp"

#include <filesystem>
#include <string>

namespace otacomm {

/// `t,v` header, one row per sample, 15 significant digits.
void write_waveform_csv(const std::filesystem::path& path, const Waveform& wf);

/// `v_in,v_out` header, one row per point.
void write_transfer_csv(const std::filesystem::path& path, const TransferCurve& curve);

/// `mean_step,min_step,max_step,count` header plus a single data row.
void write_step_stats_csv(const std::filesystem::path& path, const StepStats& stats);

/// Deterministic shortest-ish decimal rendering used by every CSV writer.
std::string format_double(double x);

} // namespace otacomm
