#include "bva/fields.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace bva {

FourierField::FourierField(int n, int N, std::uint64_t seed, int cap, double amplitude) : n_(n), N_(N) {
    if (n < 1 || n > 3 || N < 1) throw DimensionError("Fourier fields need 1 <= n <= 3 and N >= 1");
    if (cap < 1) throw DomainError("frequency cap must be positive");
    std::vector<int> k(static_cast<std::size_t>(n), -cap);
    for (;;) {
        Eigen::VectorXd f(n);
        for (int a = 0; a < n; ++a) f[a] = k[a];
        freqs_.push_back(f);
        int a = n - 1;
        while (a >= 0 && k[a] == cap) k[a--] = -cap;
        if (a < 0) break;
        ++k[a];
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto M = static_cast<Eigen::Index>(freqs_.size());
    cos_.resize(N, M);
    sin_.resize(N, M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double decay = amplitude / (1.0 + freqs_[m].squaredNorm());
        for (int j = 0; j < N; ++j) {
            cos_(j, m) = decay * normal(rng);
            sin_(j, m) = decay * normal(rng);
        }
    }
}

void FourierField::evaluate(const Point& x, std::span<double> out) const {
    Eigen::Map<Eigen::VectorXd> o(out.data(), N_);
    o.setZero();
    for (std::size_t m = 0; m < freqs_.size(); ++m) {
        const double p = freqs_[m].dot(x);
        const auto mi = static_cast<Eigen::Index>(m);
        o += cos_.col(mi) * std::cos(p) + sin_.col(mi) * std::sin(p);
    }
}

Eigen::MatrixXd FourierField::jacobian(const Point& x) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N_, n_);
    for (std::size_t m = 0; m < freqs_.size(); ++m) {
        const double p = freqs_[m].dot(x);
        const auto mi = static_cast<Eigen::Index>(m);
        J += (sin_.col(mi) * std::cos(p) - cos_.col(mi) * std::sin(p)) * freqs_[m].transpose();
    }
    return J;
}

Eigen::VectorXd FourierField::apply(const Operator& op, const Point& x) const {
    const Eigen::MatrixXd J = jacobian(x);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(op.K());
    for (int a = 0; a < n_; ++a) out += op.coeff(a) * J.col(a);
    return out;
}

FieldFn FourierField::function() const {
    return [f = *this](const Point& x, std::span<double> out) { f.evaluate(x, out); };
}

std::vector<FourierField> random_fields(int n, int N, int count, std::uint64_t seed, int cap) {
    std::vector<FourierField> out;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) out.emplace_back(n, N, rng(), cap);
    return out;
}

namespace {

std::vector<double> numbers_of(const std::string& text, int line) {
    std::vector<double> v;
    std::string s = text;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("non-numeric token '" + tok + "'", line);
        }
    }
    return v;
}

}  // namespace

DiscreteField read_field(std::istream& in) {
    std::vector<int> dims;
    std::vector<double> origin;
    double spacing = 0.0;
    int components = 0;
    std::vector<double> values;
    std::string raw;
    int line = 0;
    bool data = false;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = raw.find('=');
        if (eq != std::string::npos) {
            if (data) throw ParseError("header line after data", line);
            std::string key = raw.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            const std::vector<double> v = numbers_of(raw.substr(eq + 1), line);
            if (key == "dims") {
                dims.clear();
                for (double d : v) {
                    if (d < 1 || d != std::floor(d)) throw ParseError("dims must be positive integers", line);
                    dims.push_back(static_cast<int>(d));
                }
            } else if (key == "origin") {
                origin = v;
            } else if (key == "spacing") {
                if (v.size() != 1 || !(v[0] > 0.0)) throw ParseError("spacing must be one positive number", line);
                spacing = v[0];
            } else if (key == "components") {
                if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0]))
                    throw ParseError("components must be a positive integer", line);
                components = static_cast<int>(v[0]);
            } else {
                throw ParseError("unknown header key '" + key + "'", line);
            }
            continue;
        }
        data = true;
        if (components == 0) throw ParseError("data before 'components='", line);
        const std::vector<double> v = numbers_of(raw, line);
        if (static_cast<int>(v.size()) != components)
            throw ParseError("expected " + std::to_string(components) + " values, got " + std::to_string(v.size()),
                             line);
        values.insert(values.end(), v.begin(), v.end());
    }
    if (dims.empty() || spacing == 0.0 || components == 0)
        throw ParseError("missing dims=, spacing= or components= header", line);
    if (origin.size() != dims.size()) throw ParseError("origin must have one entry per dimension", line);
    Point o(static_cast<Eigen::Index>(dims.size()));
    for (std::size_t a = 0; a < dims.size(); ++a) o[static_cast<Eigen::Index>(a)] = origin[a];
    Grid g(dims, o, spacing);
    if (values.size() != g.size() * static_cast<std::size_t>(components))
        throw ParseError("expected " + std::to_string(g.size()) + " cells, got " +
                             std::to_string(values.size() / static_cast<std::size_t>(components)),
                         line);
    return DiscreteField(std::move(g), components, std::move(values));
}

DiscreteField read_field_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open field file: " + path.string());
    return read_field(in);
}

void write_field(std::ostream& out, const DiscreteField& u) {
    const Grid& g = u.grid();
    std::ostringstream s;
    s.precision(17);
    s << "dims=";
    for (int a = 0; a < g.dim(); ++a) s << (a ? "," : "") << g.cells(a);
    s << "\norigin=";
    for (int a = 0; a < g.dim(); ++a) s << (a ? "," : "") << g.origin()[a];
    s << "\nspacing=" << g.spacing() << "\ncomponents=" << u.components() << '\n';
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto v = u.at(c);
        for (int j = 0; j < u.components(); ++j) s << (j ? " " : "") << v[j];
        s << '\n';
    }
    out << s.str();
}

}  // namespace bva
