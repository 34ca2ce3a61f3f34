#include "fraclaws/torus.hpp"

#include "fraclaws/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fraclaws {

TorusGrid::TorusGrid(std::size_t num_points) : m(num_points) {
    if (m < 8 || !is_power_of_two(m))
        throw std::invalid_argument("TorusGrid: num_points must be a power of two >= 8");
}

Field::Field(TorusGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.m) throw std::invalid_argument("Field: value count != grid size");
}

Field::Field(TorusGrid g, double fill) : grid(g), values(g.m, fill) {}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::complex<double> SpectralField::coeff(long n) const {
    const long m = static_cast<long>(grid.m);
    long j = n % m;
    if (j < 0) j += m;
    return coefficients[static_cast<std::size_t>(j)];
}

long SpectralField::mode_of(std::size_t j) const {
    const long m = static_cast<long>(grid.m);
    const long jj = static_cast<long>(j);
    return jj <= m / 2 ? jj : jj - m;
}

SpectralField dft(const Field& f) {
    const std::size_t m = f.grid.m;
    std::vector<std::complex<double>> a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = f.values[i];
    fft_radix2(a, /*inverse=*/false);
    const double scale = 1.0 / static_cast<double>(m);
    for (auto& c : a) c *= scale;
    return SpectralField{f.grid, std::move(a)};
}

Field idft(const SpectralField& s) {
    std::vector<std::complex<double>> a = s.coefficients;
    fft_radix2(a, /*inverse=*/true);
    Field f(s.grid);
    for (std::size_t i = 0; i < a.size(); ++i) f.values[i] = a[i].real();
    return f;
}

double lp_norm(const Field& f, double p) {
    if (p == kInfNorm) {
        double mx = 0.0;
        for (double v : f.values) mx = std::max(mx, std::abs(v));
        return mx;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double h = f.grid.spacing();
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(h * acc, 1.0 / p);
}

double mean(const Field& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return acc / static_cast<double>(f.size());
}

double total_variation(const Field& f) {
    const std::size_t m = f.size();
    double tv = 0.0;
    for (std::size_t i = 0; i < m; ++i) tv += std::abs(f.values[(i + 1) % m] - f.values[i]);
    return tv;
}

double h_lambda_seminorm(const Field& f, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("h_lambda_seminorm: lambda must be in (0,1)");
    const SpectralField s = dft(f);
    double acc = 0.0;
    for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
        const double n = std::abs(static_cast<double>(s.mode_of(j)));
        if (n == 0.0) continue;
        acc += std::pow(n, 2.0 * lambda) * std::norm(s.coefficients[j]);
    }
    return std::sqrt(acc);
}

double h_lambda_norm(const Field& f, double lambda) {
    const SpectralField s = dft(f);
    double acc = 0.0;
    for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
        const double n = static_cast<double>(s.mode_of(j));
        acc += std::pow(1.0 + n * n, lambda) * std::norm(s.coefficients[j]);
    }
    return std::sqrt(acc);
}

double trig_eval(const SpectralField& s, double x) {
    // Real form of the mode sum with Chebyshev-style recurrences for cos(nx),
    // sin(nx). The Nyquist mode contributes cos((m/2) x) only.
    const long half = static_cast<long>(s.grid.m) / 2;
    const double c1 = std::cos(x), s1 = std::sin(x);
    double cn = 1.0, sn = 0.0;  // cos(0), sin(0)
    double acc = s.coeff(0).real();
    for (long n = 1; n < half; ++n) {
        const double cnext = cn * c1 - sn * s1;
        const double snext = sn * c1 + cn * s1;
        cn = cnext;
        sn = snext;
        const std::complex<double> c = s.coeff(n);
        acc += 2.0 * (c.real() * cn - c.imag() * sn);
    }
    // Nyquist
    {
        const double cnext = cn * c1 - sn * s1;
        acc += s.coeff(half).real() * cnext;
    }
    return acc;
}

Field shift(const SpectralField& s, double z) {
    const std::size_t m = s.grid.m;
    std::vector<std::complex<double>> a(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double n = static_cast<double>(s.mode_of(j));
        a[j] = s.coefficients[j] * std::complex<double>(std::cos(n * z), std::sin(n * z));
    }
    return idft(SpectralField{s.grid, std::move(a)});
}

Field operator+(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw std::invalid_argument("Field +: grid mismatch");
    Field r(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = a.values[i] + b.values[i];
    return r;
}

Field operator-(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw std::invalid_argument("Field -: grid mismatch");
    Field r(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = a.values[i] - b.values[i];
    return r;
}

Field operator*(double c, const Field& f) {
    Field r(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) r.values[i] = c * f.values[i];
    return r;
}

namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("read_field_binary: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_field_binary(const Field& f, std::ostream& out) {
    put_u64_le(out, static_cast<std::uint64_t>(f.size()));
    for (double v : f.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64_le(out, bits);
    }
}

Field read_field_binary(std::istream& in) {
    const std::uint64_t m = get_u64_le(in);
    Field f{TorusGrid(static_cast<std::size_t>(m))};
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t bits = get_u64_le(in);
        double v;
        std::memcpy(&v, &bits, 8);
        f.values[i] = v;
    }
    if (!in) throw std::runtime_error("read_field_binary: truncated payload");
    return f;
}

void write_field_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field_binary(f, out);
}

Field read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_field_binary(in);
}

void write_field_csv(const Field& f, std::ostream& out) {
    out << "index,x,value\n";
    std::ostringstream line;
    line.precision(17);
    for (std::size_t i = 0; i < f.size(); ++i) {
        line.str("");
        line << i << ',' << f.grid.x(i) << ',' << f.values[i] << '\n';
        out << line.str();
    }
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field_csv(f, out);
}

}  // namespace fraclaws
