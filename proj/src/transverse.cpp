#include "twophoton/transverse.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace twophoton {

void GridGeometry::validate() const {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument(fmt::format("grid needs at least 2x2 samples, got {}x{}", nx, ny));
    }
    if (!(width_x > 0.0) || !(width_y > 0.0)) {
        throw std::invalid_argument("grid window extents must be positive");
    }
}

FieldGrid::FieldGrid(GridGeometry geometry, std::vector<Complex> samples, double plane_z, double wavelength)
    : geometry_(geometry), samples_(std::move(samples)), plane_z_(plane_z), wavelength_(wavelength) {
    geometry_.validate();
    if (samples_.size() != static_cast<std::size_t>(geometry_.nx) * geometry_.ny) {
        throw std::invalid_argument("sample count does not match grid geometry");
    }
    if (!(wavelength_ > 0.0)) throw std::invalid_argument("wavelength must be positive");
    const double p = power();
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("field power must be finite and positive");
    }
}

Complex FieldGrid::interpolate(double x, double y) const {
    const auto& g = geometry_;
    const double fx = (x - g.x(0)) / g.dx();
    const double fy = (y - g.y(0)) / g.dy();
    if (!(fx >= 0.0) || !(fy >= 0.0) || fx > g.nx - 1 || fy > g.ny - 1) return 0.0;
    int ix = std::min(static_cast<int>(fx), g.nx - 2);
    int iy = std::min(static_cast<int>(fy), g.ny - 2);
    const double tx = fx - ix;
    const double ty = fy - iy;
    return (1.0 - ty) * ((1.0 - tx) * at(ix, iy) + tx * at(ix + 1, iy)) +
           ty * ((1.0 - tx) * at(ix, iy + 1) + tx * at(ix + 1, iy + 1));
}

double FieldGrid::power() const {
    double acc = 0.0;
    for (const auto& v : samples_) acc += std::norm(v);
    return acc * geometry_.dx() * geometry_.dy();
}

double PumpSpec::waist() const {
    return std::visit([](const auto& k) { return k.waist; }, kind);
}

namespace {

struct PumpSampler {
    double x;
    double y;

    Complex operator()(const GaussianPump& p) const {
        return std::exp(-(x * x + y * y) / (p.waist * p.waist));
    }
    Complex operator()(const HermiteGaussPump& p) const {
        const double u = std::numbers::sqrt2 * x / p.waist;
        const double v = std::numbers::sqrt2 * y / p.waist;
        return std::hermite(p.m, u) * std::hermite(p.n, v) * std::exp(-(x * x + y * y) / (p.waist * p.waist));
    }
    Complex operator()(const PhaseStepPump& p) const {
        const Complex g = std::exp(-(x * x + y * y) / (p.waist * p.waist));
        return y < 0.0 ? g * std::polar(p.transmission, p.step_phase) : g;
    }
};

void validate_pump(const PumpSpec& spec) {
    if (!(spec.wavelength > 0.0)) throw std::invalid_argument("pump wavelength must be positive");
    if (!(spec.waist() > 0.0)) throw std::invalid_argument("pump waist must be positive");
    if (const auto* hg = std::get_if<HermiteGaussPump>(&spec.kind)) {
        if (hg->m < 0 || hg->n < 0) throw std::invalid_argument("Hermite-Gauss orders must be >= 0");
    }
    if (const auto* ps = std::get_if<PhaseStepPump>(&spec.kind)) {
        if (!(ps->transmission > 0.0 && ps->transmission <= 1.0)) {
            throw std::invalid_argument("phase-step transmission must lie in (0, 1]");
        }
    }
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

double frequency(int k, int n, double width) {
    const int shifted = k < (n + 1) / 2 ? k : k - n;
    return shifted / width;
}

} // namespace

FieldGrid synthesize_pump(const PumpSpec& spec, const GridGeometry& geometry) {
    geometry.validate();
    validate_pump(spec);
    const double w = spec.waist();
    if (geometry.width_x < 6.0 * w || geometry.width_y < 6.0 * w) {
        throw std::invalid_argument(fmt::format(
            "window {:g} x {:g} m is narrower than 6 waists ({:g} m); the beam would alias",
            geometry.width_x, geometry.width_y, 6.0 * w));
    }
    std::vector<Complex> samples(static_cast<std::size_t>(geometry.nx) * geometry.ny);
    for (int iy = 0; iy < geometry.ny; ++iy) {
        for (int ix = 0; ix < geometry.nx; ++ix) {
            samples[static_cast<std::size_t>(iy) * geometry.nx + ix] =
                std::visit(PumpSampler{geometry.x(ix), geometry.y(iy)}, spec.kind);
        }
    }
    return FieldGrid(geometry, std::move(samples), 0.0, spec.wavelength);
}

FieldGrid fresnel_propagate(const FieldGrid& field, double distance) {
    if (!(distance >= 0.0)) throw std::invalid_argument("propagation distance must be >= 0");
    if (distance == 0.0) return field;

    const auto& g = field.geometry();
    const double lz = field.wavelength() * distance;
    if (g.dx() * g.width_x < lz || g.dy() * g.width_y < lz) {
        throw std::invalid_argument(fmt::format(
            "transfer function undersampled: need dx*Lx >= lambda*z, have dx*Lx = {:g}, dy*Ly = {:g}, "
            "lambda*z = {:g} m^2; use a coarser step or a wider window",
            g.dx() * g.width_x, g.dy() * g.width_y, lz));
    }

    std::vector<Complex> buf = field.samples();
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    FftwPlan forward(fftw_plan_dft_2d(g.ny, g.nx, data, data, FFTW_FORWARD, FFTW_ESTIMATE));
    FftwPlan backward(fftw_plan_dft_2d(g.ny, g.nx, data, data, FFTW_BACKWARD, FFTW_ESTIMATE));
    fftw_execute(forward.get());

    const double scale = 1.0 / (static_cast<double>(g.nx) * g.ny);
    for (int ky = 0; ky < g.ny; ++ky) {
        const double fy = frequency(ky, g.ny, g.width_y);
        for (int kx = 0; kx < g.nx; ++kx) {
            const double fx = frequency(kx, g.nx, g.width_x);
            const double phase = -std::numbers::pi * lz * (fx * fx + fy * fy);
            buf[static_cast<std::size_t>(ky) * g.nx + kx] *= std::polar(scale, phase);
        }
    }
    fftw_execute(backward.get());
    return FieldGrid(g, std::move(buf), field.plane_z() + distance, field.wavelength());
}

namespace {

void require_y_symmetric(const GridGeometry& g) {
    if (g.center_y != 0.0) {
        throw std::invalid_argument(
            fmt::format("parity analysis needs a window centered on y = 0 (center_y = {:g})", g.center_y));
    }
}

} // namespace

ParityParts parity_parts(const FieldGrid& field) {
    const auto& g = field.geometry();
    require_y_symmetric(g);
    ParityParts parts{std::vector<Complex>(field.samples().size()), std::vector<Complex>(field.samples().size())};
    for (int iy = 0; iy < g.ny; ++iy) {
        const int my = g.ny - 1 - iy;
        for (int ix = 0; ix < g.nx; ++ix) {
            const Complex a = field.at(ix, iy);
            const Complex b = field.at(ix, my);
            const auto k = static_cast<std::size_t>(iy) * g.nx + ix;
            parts.even[k] = 0.5 * (a + b);
            parts.odd[k] = 0.5 * (a - b);
        }
    }
    return parts;
}

ParityFractions parity_decompose(const FieldGrid& field) {
    const auto& g = field.geometry();
    require_y_symmetric(g);
    double pe = 0.0;
    double po = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const int my = g.ny - 1 - iy;
        for (int ix = 0; ix < g.nx; ++ix) {
            const Complex a = field.at(ix, iy);
            const Complex b = field.at(ix, my);
            pe += std::norm(0.5 * (a + b));
            po += std::norm(0.5 * (a - b));
        }
    }
    const double total = pe + po;
    return {pe / total, po / total};
}

void write_field_csv(const FieldGrid& field, std::ostream& out) {
    const auto& g = field.geometry();
    out << "x,y,re,im\n";
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const Complex v = field.at(ix, iy);
            out << fmt::format("{:.9e},{:.9e},{:.9e},{:.9e}\n", g.x(ix), g.y(iy), v.real(), v.imag());
        }
    }
}

} // namespace twophoton
