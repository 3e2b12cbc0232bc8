#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ovna/apc.hpp"
#include "ovna/dsp.hpp"
#include "ovna/synth.hpp"

namespace ovna {

/// Writes `content` atomically: the data lands in a temporary file first and
/// is renamed into place, so a crash never leaves a truncated file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Binary waveform container (little-endian): magic "OVNA", format version,
/// channel count, sample rate, sample count, per-channel full scales, then
/// the channels as contiguous float32 runs in X, Y, AUX, TRK order.
/// Sweep metadata travels in a text sidecar next to the file.
void write_waveform(const std::filesystem::path& path, const WaveformRecord& record);
WaveformRecord read_waveform(const std::filesystem::path& path);

void write_metrics_csv(const std::filesystem::path& path, const MetricsSeries& series);
MetricsSeries read_metrics_csv(const std::filesystem::path& path);

void write_tracking_csv(const std::filesystem::path& path, const TrackingTrace& trace);
TrackingTrace read_tracking_csv(const std::filesystem::path& path);

/// Per-core normalized insertion loss: one row per core, one column per
/// wavelength sample.
void write_core_map_csv(const std::filesystem::path& path,
                        const std::vector<double>& wavelength,
                        const std::vector<std::vector<double>>& core_rows);
std::vector<std::vector<double>> read_core_map_csv(const std::filesystem::path& path,
                                                   std::vector<double>& wavelength_out);

/// Device response sampled on a frequency grid, for report recomputation.
void write_ground_truth_csv(const std::filesystem::path& path,
                            const TransferFunctionEstimate& truth);
TransferFunctionEstimate read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace ovna
