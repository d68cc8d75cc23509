#include "hrsnn/raster.hpp"

#include "hrsnn/error.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hrsnn {

SpikeRaster::SpikeRaster(std::size_t n_neurons, std::size_t n_bins, double dt)
    : n_neurons_(n_neurons), n_bins_(n_bins), dt_(dt), bits_(n_neurons * n_bins, 0) {
    if (!(dt > 0.0)) throw InvalidArgument("raster dt must be > 0");
}

std::size_t SpikeRaster::total_spikes() const {
    return static_cast<std::size_t>(std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}));
}

std::vector<std::size_t> SpikeRaster::spikes_per_neuron() const {
    std::vector<std::size_t> counts(n_neurons_, 0);
    for (std::size_t b = 0; b < n_bins_; ++b) {
        const auto row = bin_row(b);
        for (std::size_t i = 0; i < n_neurons_; ++i) counts[i] += row[i];
    }
    return counts;
}

std::vector<std::size_t> SpikeRaster::spike_bins(std::size_t neuron) const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < n_bins_; ++b)
        if (get(neuron, b)) out.push_back(b);
    return out;
}

SpikeRaster SpikeRaster::select_neurons(std::size_t first, std::size_t count) const {
    if (first + count > n_neurons_) throw InvalidArgument("neuron selection out of range");
    SpikeRaster out(count, n_bins_, dt_);
    for (std::size_t b = 0; b < n_bins_; ++b) {
        const auto src = bin_row(b).subspan(first, count);
        std::copy(src.begin(), src.end(), out.bin_row(b).begin());
    }
    return out;
}

void write_raster(std::ostream& os, const SpikeRaster& raster) {
    os << raster.n_neurons() << ' ' << raster.n_bins() << ' '
       << std::setprecision(std::numeric_limits<double>::max_digits10) << raster.dt() << '\n';
    for (std::size_t b = 0; b < raster.n_bins(); ++b) {
        const auto row = raster.bin_row(b);
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i]) os << i << ' ' << b << '\n';
    }
}

SpikeRaster read_raster(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("raster: missing header line");
    std::istringstream header(line);
    std::size_t n = 0, bins = 0;
    double dt = 0.0;
    if (!(header >> n >> bins >> dt)) throw DataError("raster: malformed header '" + line + "'");
    SpikeRaster r(n, bins, dt);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t i = 0, b = 0;
        if (!(ls >> i >> b) || i >= n || b >= bins)
            throw DataError("raster: bad spike entry at line " + std::to_string(lineno));
        r.set(i, b);
    }
    return r;
}

void save_raster(const std::string& path, const SpikeRaster& raster) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_raster(os, raster);
    if (!os) throw IoError("write failed: " + path);
}

SpikeRaster load_raster(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    return read_raster(is);
}

} // namespace hrsnn
