#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hrsnn {

// Binary spike record, one bit per neuron per time bin of width dt (ms).
// Stored bin-major so a simulation step writes one contiguous row.
class SpikeRaster {
public:
    SpikeRaster() = default;
    SpikeRaster(std::size_t n_neurons, std::size_t n_bins, double dt);

    std::size_t n_neurons() const { return n_neurons_; }
    std::size_t n_bins() const { return n_bins_; }
    double dt() const { return dt_; }
    double duration() const { return dt_ * static_cast<double>(n_bins_); }

    bool get(std::size_t neuron, std::size_t bin) const {
        return bits_[bin * n_neurons_ + neuron] != 0;
    }
    void set(std::size_t neuron, std::size_t bin, bool value = true) {
        bits_[bin * n_neurons_ + neuron] = value ? 1 : 0;
    }

    std::span<const std::uint8_t> bin_row(std::size_t bin) const {
        return {bits_.data() + bin * n_neurons_, n_neurons_};
    }
    std::span<std::uint8_t> bin_row(std::size_t bin) {
        return {bits_.data() + bin * n_neurons_, n_neurons_};
    }

    std::size_t total_spikes() const;
    std::vector<std::size_t> spikes_per_neuron() const;
    // Bins at which `neuron` fired, ascending.
    std::vector<std::size_t> spike_bins(std::size_t neuron) const;

    // Sub-raster of neurons [first, first + count).
    SpikeRaster select_neurons(std::size_t first, std::size_t count) const;

    bool operator==(const SpikeRaster&) const = default;

private:
    std::size_t n_neurons_ = 0;
    std::size_t n_bins_ = 0;
    double dt_ = 1.0;
    std::vector<std::uint8_t> bits_;
};

// Sparse text format: first line "n_neurons n_bins dt", then one
// "neuron bin" pair per spike, sorted by bin then neuron.
void write_raster(std::ostream& os, const SpikeRaster& raster);
SpikeRaster read_raster(std::istream& is);
void save_raster(const std::string& path, const SpikeRaster& raster);
SpikeRaster load_raster(const std::string& path);

} // namespace hrsnn
