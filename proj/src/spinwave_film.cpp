#include "stno/spinwave_film.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

#include "stno/readout.hpp"

namespace stno {

using complexd = std::complex<double>;

int contact_indicator(const Contact& c, double x, double y) {
    const double dx = x - c.x;
    const double dy = y - c.y;
    return dx * dx + dy * dy <= c.radius * c.radius ? 1 : 0;
}

double film_forcing(const std::vector<Contact>& contacts, const CarrierSpec& carrier, double gain,
                    double t, double x, double y) {
    double stencil = 0.0;
    for (const auto& c : contacts) {
        if (c.polarity == Polarity::Detector) continue;
        const double sign = c.polarity == Polarity::Positive ? 1.0 : -1.0;
        stencil += sign * contact_indicator(c, x, y);
    }
    return gain * carrier_value(carrier, t) * stencil;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

FilmGrid::FilmGrid(int nx_, int ny_, double lx_, double ly_, double sponge_width,
                   double sponge_depth, double u0)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (!power_of_two(nx) || !power_of_two(ny))
        throw PreconditionError("grid sizes must be powers of two");
    if (std::abs(lx / nx - ly / ny) > 1e-12 * (lx / nx))
        throw PreconditionError("grid cells must be square (lx/nx == ly/ny)");
    u = Eigen::ArrayXXcd::Constant(nx, ny, complexd(u0, 0.0));
    sponge = Eigen::ArrayXXd::Zero(nx, ny);
    if (sponge_width > 0.0 && sponge_depth > 0.0) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double x = x_of(i);
                const double y = y_of(j);
                const double d = std::min(std::min(x, lx - x), std::min(y, ly - y));
                if (d < sponge_width) {
                    const double c = std::cos(0.5 * kPi * d / sponge_width);
                    sponge(i, j) = -sponge_depth * c * c;
                }
            }
        }
    }
}

std::vector<Contact> reference_layout(double lx, double ly, double sponge_width) {
    const double sx = lx / 40.0;
    const double sy = ly / 40.0;
    const double r = std::min(sx, sy);
    // Bottom pair forced by p, top pair by n, right and left pairs passive.
    std::vector<Contact> contacts = {
        {1, 18.0 * sx, 8.0 * sy, r, Polarity::Positive},
        {2, 22.0 * sx, 8.0 * sy, r, Polarity::Positive},
        {3, 18.0 * sx, 32.0 * sy, r, Polarity::Negative},
        {4, 22.0 * sx, 32.0 * sy, r, Polarity::Negative},
        {5, 32.0 * sx, 14.0 * sy, r, Polarity::Detector},
        {6, 32.0 * sx, 26.0 * sy, r, Polarity::Detector},
        {7, 8.0 * sx, 26.0 * sy, r, Polarity::Detector},
        {8, 8.0 * sx, 14.0 * sy, r, Polarity::Detector},
    };
    for (const auto& c : contacts) {
        if (c.x - c.radius < sponge_width || c.x + c.radius > lx - sponge_width ||
            c.y - c.radius < sponge_width || c.y + c.radius > ly - sponge_width)
            throw LayoutOverflowError("contact " + std::to_string(c.id) +
                                      " intrudes into the sponge layer");
    }
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        for (std::size_t j = i + 1; j < contacts.size(); ++j) {
            const double d = std::hypot(contacts[i].x - contacts[j].x,
                                        contacts[i].y - contacts[j].y);
            if (d < contacts[i].radius + contacts[j].radius)
                throw LayoutOverflowError("contacts overlap");
        }
    }
    return contacts;
}

std::complex<double> dispersion_frequency(const FilmParams& params, double kx, double ky) {
    return params.omega - params.dispersion * (kx * kx + ky * ky);
}

std::vector<double> ProbeSeries::abs_u() const {
    std::vector<double> out(mean_u.size());
    for (std::size_t i = 0; i < mean_u.size(); ++i) out[i] = std::abs(mean_u[i]);
    return out;
}

FilmSolver::FilmSolver(const FilmGrid& grid, const FilmParams& params,
                       std::vector<Contact> contacts, const CarrierSpec& carrier, double gain,
                       double dt, double detector_bias)
    : grid_(grid),
      params_(params),
      contacts_(std::move(contacts)),
      carrier_(carrier),
      gain_(gain),
      dt_(dt),
      t0_(grid.t) {
    if (params_.dispersion.real() <= 0.0 || params_.dispersion.imag() < 0.0)
        throw PreconditionError("dispersion needs Re(D) > 0 and Im(D) >= 0");
    if (params_.b <= 0.0 && params_.b != 0.0)
        throw PreconditionError("saturation coefficient must be non-negative");
    if (dt_ <= 0.0) throw PreconditionError("dt must be positive");
    if (dt_ > max_dt())
        throw StepSizeError("dt " + std::to_string(dt_) + " exceeds splitting guard " +
                            std::to_string(max_dt()));
    if (detector_bias < 0.0 || detector_bias > 0.09)
        throw PreconditionError("detector bias must lie in [0, 0.09]");

    const int nx = grid_.nx, ny = grid_.ny;
    const double h = 0.5 * dt_;
    a_base_ = params_.lambda + grid_.sponge;
    if (detector_bias > 0.0) {
        for (const auto& c : contacts_) {
            if (c.polarity != Polarity::Detector) continue;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    if (contact_indicator(c, grid_.x_of(i), grid_.y_of(j)))
                        a_base_(i, j) += detector_bias;
        }
    }
    e_base_ = (2.0 * h * a_base_).exp();
    factor_.resize(nx, ny);
    s0_.resize(nx, ny);

    lin_mult_.resize(nx, ny);
    const complexd iD = complexd(0.0, 1.0) * params_.dispersion;
    const double norm = 1.0 / (static_cast<double>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const int mj = j <= ny / 2 ? j : j - ny;
        const double ky = 2.0 * kPi * mj / grid_.ly;
        for (int i = 0; i < nx; ++i) {
            const int mi = i <= nx / 2 ? i : i - nx;
            const double kx = 2.0 * kPi * mi / grid_.lx;
            lin_mult_(i, j) = std::exp(iD * (kx * kx + ky * ky) * dt_) * norm;
        }
    }

    for (const auto& c : contacts_) {
        if (c.polarity == Polarity::Detector) continue;
        const double sign = c.polarity == Polarity::Positive ? 1.0 : -1.0;
        const int i0 = std::max(0, static_cast<int>((c.x - c.radius) / grid_.dx()) - 1);
        const int i1 = std::min(nx - 1, static_cast<int>((c.x + c.radius) / grid_.dx()) + 1);
        const int j0 = std::max(0, static_cast<int>((c.y - c.radius) / grid_.dy()) - 1);
        const int j1 = std::min(ny - 1, static_cast<int>((c.y + c.radius) / grid_.dy()) + 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                if (contact_indicator(c, grid_.x_of(i), grid_.y_of(j)))
                    forced_cells_.push_back({i, j, sign});
    }

    // FFTW_MEASURE clobbers the array, so plan before restoring the field.
    // The FFTW planner is not thread-safe; serialize plan management.
    const Eigen::ArrayXXcd initial = grid_.u;
    auto* data = reinterpret_cast<fftw_complex*>(grid_.u.data());
    {
        const std::lock_guard<std::mutex> lock(planner_mutex());
        plan_fwd_ = fftw_plan_dft_2d(ny, nx, data, data, FFTW_FORWARD, FFTW_MEASURE);
        plan_bwd_ = fftw_plan_dft_2d(ny, nx, data, data, FFTW_BACKWARD, FFTW_MEASURE);
    }
    grid_.u = initial;
    prev_max_sq_ = grid_.u.abs2().maxCoeff();
}

FilmSolver::~FilmSolver() {
    const std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(plan_fwd_);
    if (plan_bwd_) fftw_destroy_plan(plan_bwd_);
}

double FilmSolver::max_dt() const {
    const double dx = grid_.dx();
    return 0.5 * dx * dx / std::abs(params_.dispersion);
}

void FilmSolver::pointwise_half(double t_forcing) {
    const double h = 0.5 * dt_;
    const double b = params_.b;

    s0_ = grid_.u.abs2();
    // Amplitude factor sqrt(s(h)/s0) of the logistic update
    // ds/dt = 2 (a - b s) s with a frozen over the half step.
    factor_ = ((a_base_.abs() < 1e-12)
                   .select((1.0 + 2.0 * b * h * s0_).inverse(),
                           a_base_ * e_base_ / (a_base_ + b * s0_ * (e_base_ - 1.0))))
                  .sqrt();

    if (!forced_cells_.empty()) {
        const double c_amp = gain_ * carrier_value(carrier_, t_forcing);
        const double e_pos = std::exp(2.0 * h * c_amp);
        for (const auto& cell : forced_cells_) {
            const double a = a_base_(cell.i, cell.j) + c_amp * cell.sign;
            const double e = e_base_(cell.i, cell.j) * (cell.sign > 0.0 ? e_pos : 1.0 / e_pos);
            const double s0 = s0_(cell.i, cell.j);
            double f2;
            if (std::abs(a) < 1e-12)
                f2 = 1.0 / (1.0 + 2.0 * b * h * s0);
            else
                f2 = a * e / (a + b * s0 * (e - 1.0));
            factor_(cell.i, cell.j) = std::sqrt(f2);
        }
    }

    const complexd rot = std::polar(1.0, -params_.omega * h);
    grid_.u = grid_.u * factor_.cast<complexd>() * rot;
}

void FilmSolver::step() {
    const double tb = t0_ + static_cast<double>(step_count_) * dt_;
    pointwise_half(tb + 0.25 * dt_);

    fftw_execute(plan_fwd_);
    grid_.u *= lin_mult_;
    fftw_execute(plan_bwd_);

    pointwise_half(tb + 0.75 * dt_);

    if (params_.amplitude_floor > 0.0) {
        const double floor2 = params_.amplitude_floor * params_.amplitude_floor;
        for (long k = 0; k < grid_.u.size(); ++k) {
            complexd& c = grid_.u.data()[k];
            const double m2 = std::norm(c);
            if (m2 > 0.0 && m2 < floor2) c *= params_.amplitude_floor / std::sqrt(m2);
        }
    }

    ++step_count_;
    grid_.t = t0_ + static_cast<double>(step_count_) * dt_;

    const double cur_max_sq = s0_.maxCoeff();
    if (prev_max_sq_ > 0.0 && cur_max_sq > 100.0 * prev_max_sq_)
        throw InstabilityError("field grew by more than 10x in one step at t=" +
                               std::to_string(grid_.t));
    prev_max_sq_ = std::max(cur_max_sq, 1e-300);
}

std::complex<double> FilmSolver::probe_mean(const Contact& c) const {
    complexd sum = 0.0;
    long count = 0;
    const int i0 = std::max(0, static_cast<int>((c.x - c.radius) / grid_.dx()) - 1);
    const int i1 = std::min(grid_.nx - 1, static_cast<int>((c.x + c.radius) / grid_.dx()) + 1);
    const int j0 = std::max(0, static_cast<int>((c.y - c.radius) / grid_.dy()) - 1);
    const int j1 = std::min(grid_.ny - 1, static_cast<int>((c.y + c.radius) / grid_.dy()) + 1);
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            if (contact_indicator(c, grid_.x_of(i), grid_.y_of(j))) {
                sum += grid_.u(i, j);
                ++count;
            }
        }
    }
    if (count == 0) throw PreconditionError("contact disk contains no grid cells");
    return sum / static_cast<double>(count);
}

double FilmSolver::l2_norm() const {
    return std::sqrt(grid_.u.abs2().sum() * grid_.dx() * grid_.dy());
}

FilmRunResult simulate_film(FilmSolver& solver, double t_end, int probe_stride,
                            int snapshot_stride) {
    if (probe_stride <= 0) throw PreconditionError("probe stride must be positive");
    const double t_start = solver.grid().t;
    if (t_end <= t_start) throw PreconditionError("t_end must exceed the current time");
    const long n_steps = std::lround((t_end - t_start) / solver.dt());

    FilmRunResult result;
    result.probes.resize(solver.contacts().size());
    for (std::size_t c = 0; c < solver.contacts().size(); ++c)
        result.probes[c].contact_id = solver.contacts()[c].id;

    auto record = [&](long step) {
        for (std::size_t c = 0; c < solver.contacts().size(); ++c) {
            result.probes[c].times.push_back(solver.grid().t);
            result.probes[c].mean_u.push_back(solver.probe_mean(solver.contacts()[c]));
        }
        if (snapshot_stride > 0 && step % snapshot_stride == 0)
            result.snapshots.emplace_back(solver.grid().t, solver.grid().u.abs());
    };

    record(0);
    for (long i = 1; i <= n_steps; ++i) {
        solver.step();
        if (i % probe_stride == 0 || i == n_steps) record(i);
    }
    return result;
}

std::optional<Digit> decode_probe(const ProbeSeries& probe, const CarrierSpec& carrier) {
    if (probe.times.size() < 2) throw PreconditionError("probe series too short to decode");
    const double t0 = probe.times.front();
    const double t_cut = t0 + (probe.times.back() - t0) / 3.0;
    // Start at the last sample at or before the cut, so the retained window
    // always spans at least two thirds of the run; starting strictly after
    // the cut can quantize a 2-period window just below the correlation
    // minimum.
    std::size_t start = 0;
    for (std::size_t i = 0; i < probe.times.size(); ++i)
        if (probe.times[i] <= t_cut) start = i;
    std::vector<double> times, abs_u;
    double peak = 0.0;
    for (std::size_t i = start; i < probe.times.size(); ++i) {
        times.push_back(probe.times[i]);
        const double a = std::abs(probe.mean_u[i]);
        abs_u.push_back(a);
        peak = std::max(peak, a);
    }
    if (peak < 1e-12) return std::nullopt;
    const CorrelationResult res = correlate(times, abs_u, carrier, peak);
    return res.digit;
}

std::map<int, Digit> decode_detectors(const std::vector<ProbeSeries>& probes,
                                      const CarrierSpec& carrier) {
    std::map<int, Digit> digits;
    for (const auto& probe : probes) {
        const auto d = decode_probe(probe, carrier);
        if (!d)
            throw IndeterminateError("probe " + std::to_string(probe.contact_id) +
                                     " correlation indeterminate");
        digits[probe.contact_id] = *d;
    }
    return digits;
}

}  // namespace stno
