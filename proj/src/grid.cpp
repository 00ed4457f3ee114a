#include "dvar/grid.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dvar {

namespace {

std::string shortest(double v) {
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

} // namespace

Partition::Partition(double t0, double h, int n) : t0_(t0), h_(h), n_(n) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("partition step must be positive");
    if (n < 4) throw Error("partition needs n >= 4, got n = " + std::to_string(n));
    if (!std::isfinite(t0)) throw Error("partition start time must be finite");
}

Partition Partition::cover(double a, double b, int n) {
    if (!(a < b)) throw Error("partition cover needs a < b");
    return Partition(a, (b - a) / n, n);
}

GridFn::GridFn(Partition partition, std::vector<double> values)
    : part_(partition), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != part_.n() + 1)
        throw Error("grid function needs n+1 = " + std::to_string(part_.n() + 1) +
                    " values, got " + std::to_string(values_.size()));
}

GridFn GridFn::shifted() const {
    std::vector<double> v(values_.begin() + 1, values_.end());
    v.push_back(0.0);
    return GridFn(part_.shifted(), std::move(v));
}

void GridFn::write_csv(std::ostream& out) const {
    out << "p,t,q\n";
    for (int p = 0; p <= n(); ++p)
        out << p << ',' << shortest(time(p)) << ',' << shortest(values_[static_cast<std::size_t>(p)])
            << '\n';
}

void GridFn::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_csv(out);
}

GridFn GridFn::read_csv(std::istream& in) {
    std::string line;
    // Trajectory CSVs are a superset (extra columns, trailing comments) and
    // are accepted here so integrator output can be fed back in directly.
    if (!std::getline(in, line) || (line != "p,t,q" && line.rfind("p,t,q,", 0) != 0))
        throw Error("grid CSV must start with header 'p,t,q'");
    std::vector<double> times, values;
    int expect = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string pf, tf, qf;
        if (!std::getline(row, pf, ',') || !std::getline(row, tf, ',') ||
            !std::getline(row, qf, ','))
            throw Error("malformed grid CSV row: '" + line + "'");
        if (std::atoi(pf.c_str()) != expect)
            throw Error("grid CSV rows must be indexed 0..n in order");
        times.push_back(std::strtod(tf.c_str(), nullptr));
        values.push_back(std::strtod(qf.c_str(), nullptr));
        ++expect;
    }
    if (times.size() < 2) throw Error("grid CSV has too few rows");
    const int n = static_cast<int>(times.size()) - 1;
    const double t0 = times.front();
    const double h = (times.back() - t0) / n;
    Partition part(t0, h, n);
    for (int p = 0; p <= n; ++p) {
        const double tp = times[static_cast<std::size_t>(p)];
        if (std::abs(tp - part.time(p)) > 1e-9 * (1.0 + std::abs(tp)))
            throw Error("grid CSV times are not uniformly spaced");
    }
    return GridFn(part, std::move(values));
}

GridFn GridFn::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_csv(in);
}

IndexedSeq::IndexedSeq(int first, std::vector<double> values)
    : first_(first), values_(std::move(values)) {}

double IndexedSeq::operator[](int p) const {
    if (p < first_ || p > last())
        throw Error("index " + std::to_string(p) + " outside valid range [" +
                    std::to_string(first_) + ", " + std::to_string(last()) + "]");
    return values_[static_cast<std::size_t>(p - first_)];
}

IndexedSeq delta_minus(const GridFn& q) {
    const int n = q.n();
    const double h = q.h();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) v[static_cast<std::size_t>(p - 1)] = (q[p] - q[p - 1]) / h;
    return IndexedSeq(1, std::move(v));
}

IndexedSeq delta_plus(const GridFn& q) {
    const int n = q.n();
    const double h = q.h();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int p = 0; p <= n - 1; ++p) v[static_cast<std::size_t>(p)] = (q[p] - q[p + 1]) / h;
    return IndexedSeq(0, std::move(v));
}

IndexedSeq second_diff(const GridFn& q) {
    const int n = q.n();
    const double h = q.h();
    std::vector<double> v(static_cast<std::size_t>(n - 1));
    for (int p = 1; p <= n - 1; ++p)
        v[static_cast<std::size_t>(p - 1)] = (q[p + 1] - 2.0 * q[p] + q[p - 1]) / (h * h);
    return IndexedSeq(1, std::move(v));
}

bool in_boundary_class(const GridFn& w, BoundaryClass c) {
    const int n = w.n();
    switch (c) {
        case BoundaryClass::Free:
            return true;
        case BoundaryClass::Zero1:
            return w[0] == 0.0 && w[n] == 0.0;
        case BoundaryClass::Zero2:
            return w[0] == 0.0 && w[1] == 0.0 && w[n - 1] == 0.0 && w[n] == 0.0;
    }
    return false;
}

} // namespace dvar
