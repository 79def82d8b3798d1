#pragma once

#include "twophoton/polarization.hpp"

#include <iosfwd>
#include <variant>
#include <vector>

namespace twophoton {

/// Rectangular sampling window. Samples sit at cell centers, so a window
/// centered on y = 0 is exactly mirror-symmetric under y -> -y.
struct GridGeometry {
    int nx = 256;
    int ny = 256;
    double width_x = 20e-3;
    double width_y = 20e-3;
    double center_x = 0.0;
    double center_y = 0.0;

    double dx() const { return width_x / nx; }
    double dy() const { return width_y / ny; }
    double x(int ix) const { return center_x - 0.5 * width_x + (ix + 0.5) * dx(); }
    double y(int iy) const { return center_y - 0.5 * width_y + (iy + 0.5) * dy(); }

    /// Throws std::invalid_argument on fewer than 2 samples or non-positive extents.
    void validate() const;

    bool operator==(const GridGeometry&) const = default;
};

/// Complex scalar field W(x, y) on a transverse plane. Row-major: index iy * nx + ix.
class FieldGrid {
public:
    FieldGrid(GridGeometry geometry, std::vector<Complex> samples, double plane_z, double wavelength);

    const GridGeometry& geometry() const { return geometry_; }
    const std::vector<Complex>& samples() const { return samples_; }
    double plane_z() const { return plane_z_; }
    double wavelength() const { return wavelength_; }

    Complex at(int ix, int iy) const { return samples_[static_cast<std::size_t>(iy) * geometry_.nx + ix]; }

    /// Bilinear interpolation between sample centers; zero outside the sampled hull.
    Complex interpolate(double x, double y) const;

    /// Sum of |W|^2 times the cell area.
    double power() const;

private:
    GridGeometry geometry_;
    std::vector<Complex> samples_;
    double plane_z_;
    double wavelength_;
};

struct GaussianPump {
    double waist;
};

/// HG_mn: Hermite polynomial of order m along x and n along y.
struct HermiteGaussPump {
    int m;
    int n;
    double waist;
};

/// Gaussian beam with a thin plate covering the y < 0 half: that half
/// picks up exp(i * step_phase) * transmission.
struct PhaseStepPump {
    double waist;
    double step_phase;
    double transmission = 1.0;
};

struct PumpSpec {
    std::variant<GaussianPump, HermiteGaussPump, PhaseStepPump> kind;
    double wavelength = 351e-9;

    double waist() const;
};

/// Samples the pump at z = 0 with unit peak amplitude of the underlying Gaussian.
/// Rejects windows narrower than 6 waists in either direction.
FieldGrid synthesize_pump(const PumpSpec& spec, const GridGeometry& geometry);

/// Paraxial angular-spectrum propagation over `distance` meters. Requires
/// dx * width_x >= wavelength * distance (and likewise in y) so the transfer
/// chirp is sampled without aliasing.
FieldGrid fresnel_propagate(const FieldGrid& field, double distance);

struct ParityFractions {
    double even;
    double odd;
};

/// Power fractions of the y-even and y-odd parts 0.5 * [W(x,y) +/- W(x,-y)].
/// Requires a window centered on y = 0.
ParityFractions parity_decompose(const FieldGrid& field);

struct ParityParts {
    std::vector<Complex> even;
    std::vector<Complex> odd;
};

/// Even and odd parts, sample-for-sample on the input grid.
ParityParts parity_parts(const FieldGrid& field);

/// CSV dump: header "x,y,re,im", then one row per sample in row-major order.
void write_field_csv(const FieldGrid& field, std::ostream& out);

} // namespace twophoton
