#ifndef STNO_SPINWAVE_FILM_HPP
#define STNO_SPINWAVE_FILM_HPP

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "stno/logic_encoding.hpp"

// Forward declarations from fftw3.h; the implementation owns the plans.
struct fftw_plan_s;

namespace stno {

struct FilmParams {
    std::complex<double> dispersion{1.0, 0.01};  // D; Im(D) damps high wavenumbers
    double omega = 0.15;
    double lambda = -0.1;
    double b = 0.1;
    // Pointwise |u| clamp after every step; 0 disables (see kAmplitudeFloor
    // in stno_network.hpp for the rationale).
    double amplitude_floor = 0.0;
};

enum class Polarity { Positive, Negative, Detector };

struct Contact {
    int id = 0;
    double x = 0.0, y = 0.0;
    double radius = 1.0;
    Polarity polarity = Polarity::Detector;
};

/// 1 iff (x,y) lies in the closed contact disk.
int contact_indicator(const Contact& c, double x, double y);

/// gain * p(t) * sum of signed indicators (+ Positive, - Negative,
/// 0 Detector).
double film_forcing(const std::vector<Contact>& contacts, const CarrierSpec& carrier, double gain,
                    double t, double x, double y);

inline constexpr double kDefaultSpongeWidth = 4.0;
inline constexpr double kDefaultSpongeDepth = 0.5;

/// Periodic 2D grid with cell-centered coordinates and an absorbing sponge
/// profile (0 in the interior, ramping to -depth at the boundary).
struct FilmGrid {
    int nx = 256, ny = 256;
    double lx = 40.0, ly = 40.0;
    double t = 0.0;
    Eigen::ArrayXXcd u;       // nx x ny, x index fast
    Eigen::ArrayXXd sponge;   // <= 0

    FilmGrid(int nx_, int ny_, double lx_, double ly_,
             double sponge_width = kDefaultSpongeWidth,
             double sponge_depth = kDefaultSpongeDepth,
             double u0 = 0.01);

    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double x_of(int i) const { return (i + 0.5) * dx(); }
    double y_of(int j) const { return (j + 0.5) * dy(); }
};

/// Source/detector geometry of the two-pair communication experiment on a
/// square domain (reference coordinates on 40x40, scaled by lx/40).
std::vector<Contact> reference_layout(double lx = 40.0, double ly = 40.0,
                                 double sponge_width = kDefaultSpongeWidth);

/// Plane-wave frequency Omega(k) = omega - D |k|^2 of the linearized film.
std::complex<double> dispersion_frequency(const FilmParams& params, double kx, double ky);

struct ProbeSeries {
    int contact_id = 0;
    std::vector<double> times;
    std::vector<std::complex<double>> mean_u;

    std::vector<double> abs_u() const;
};

/// Strang-split integrator: pointwise half-steps (closed-form radial update
/// plus exact phase rotation) around a spectral linear substep
/// exp(i D |k|^2 dt) on the periodic grid.
class FilmSolver {
  public:
    /// detector_bias is a constant sub-threshold drive applied inside
    /// detector contacts (0 disables it).
    FilmSolver(const FilmGrid& grid, const FilmParams& params, std::vector<Contact> contacts,
               const CarrierSpec& carrier, double gain, double dt, double detector_bias = 0.0);
    ~FilmSolver();
    FilmSolver(const FilmSolver&) = delete;
    FilmSolver& operator=(const FilmSolver&) = delete;

    void step();

    const FilmGrid& grid() const { return grid_; }
    Eigen::ArrayXXcd& field() { return grid_.u; }
    double dt() const { return dt_; }
    double max_dt() const;
    const std::vector<Contact>& contacts() const { return contacts_; }

    /// Mean of u over the grid cells inside the contact disk.
    std::complex<double> probe_mean(const Contact& c) const;

    /// Discrete L2 norm of the field.
    double l2_norm() const;

  private:
    void pointwise_half(double t_forcing);

    FilmGrid grid_;
    FilmParams params_;
    std::vector<Contact> contacts_;
    CarrierSpec carrier_;
    double gain_;
    double dt_;
    long step_count_ = 0;
    double t0_ = 0.0;
    double prev_max_sq_ = 0.0;

    Eigen::ArrayXXd a_base_;      // lambda + sponge
    Eigen::ArrayXXd e_base_;      // exp(2 (dt/2) a_base)
    Eigen::ArrayXXcd lin_mult_;   // exp(i D |k|^2 dt) / (nx ny)
    Eigen::ArrayXXd factor_;      // scratch
    Eigen::ArrayXXd s0_;          // scratch |u|^2
    struct ForcedCell {
        int i, j;
        double sign;
    };
    std::vector<ForcedCell> forced_cells_;
    fftw_plan_s* plan_fwd_ = nullptr;
    fftw_plan_s* plan_bwd_ = nullptr;
};

struct FilmRunResult {
    std::vector<ProbeSeries> probes;  // one per contact, in input order
    std::vector<std::pair<double, Eigen::ArrayXXd>> snapshots;  // (t, |u|)
};

/// Repeated stepping to t_end, recording contact means every probe_stride
/// steps (snapshot_stride 0 disables snapshots).
FilmRunResult simulate_film(FilmSolver& solver, double t_end, int probe_stride,
                            int snapshot_stride = 0);

/// Correlation readout of one probe's |u| series against the carrier,
/// normalized by the series' own peak amplitude over the post-transient
/// window.  Empty when indeterminate or silent.
std::optional<Digit> decode_probe(const ProbeSeries& probe, const CarrierSpec& carrier);

/// decode_probe over every series; throws IndeterminateError on any
/// indeterminate probe.  Keyed by contact id.
std::map<int, Digit> decode_detectors(const std::vector<ProbeSeries>& probes,
                                      const CarrierSpec& carrier);

}  // namespace stno

#endif
