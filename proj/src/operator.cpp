#include "bva/operator.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace bva {

Operator::Operator(std::vector<Eigen::MatrixXd> coeffs, std::string name)
    : coeffs_(std::move(coeffs)), name_(std::move(name)) {
    if (coeffs_.empty()) throw DimensionError("operator needs at least one coefficient matrix");
    const auto rows = coeffs_[0].rows();
    const auto cols = coeffs_[0].cols();
    if (rows == 0 || cols == 0) throw DimensionError("coefficient matrices must be non-empty");
    bool nonzero = false;
    for (std::size_t a = 0; a < coeffs_.size(); ++a) {
        if (coeffs_[a].rows() != rows || coeffs_[a].cols() != cols)
            throw DimensionError("coefficient A" + std::to_string(a + 1) + " is " +
                                 std::to_string(coeffs_[a].rows()) + "x" +
                                 std::to_string(coeffs_[a].cols()) + ", expected " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
        nonzero = nonzero || coeffs_[a].cwiseAbs().maxCoeff() > 0.0;
    }
    if (!nonzero) throw DimensionError("operator is identically zero");
}

Eigen::MatrixXd Operator::symbol(const Eigen::VectorXd& xi) const {
    if (xi.size() != n())
        throw DimensionError("frequency has length " + std::to_string(xi.size()) + ", expected n=" +
                             std::to_string(n()));
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(K(), N());
    for (int a = 0; a < n(); ++a) s += xi[a] * coeffs_[a];
    return s;
}

Eigen::MatrixXcd Operator::symbol(const Eigen::VectorXcd& xi) const {
    if (xi.size() != n())
        throw DimensionError("frequency has length " + std::to_string(xi.size()) + ", expected n=" +
                             std::to_string(n()));
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(K(), N());
    for (int a = 0; a < n(); ++a) s += xi[a] * coeffs_[a].cast<Complex>();
    return s;
}

Eigen::VectorXd Operator::pairing(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
    if (v.size() != N())
        throw DimensionError("vector has length " + std::to_string(v.size()) + ", expected N=" +
                             std::to_string(N()));
    return symbol(z) * v;
}

Operator Operator::adjoint() const {
    std::vector<Eigen::MatrixXd> t;
    t.reserve(coeffs_.size());
    for (const auto& c : coeffs_) t.emplace_back(c.transpose());
    return Operator(std::move(t), name_.empty() ? std::string{} : name_ + "*");
}

Operator Operator::scaled(double c) const {
    std::vector<Eigen::MatrixXd> s;
    for (const auto& m : coeffs_) s.emplace_back(c * m);
    return Operator(std::move(s), name_);
}

double Operator::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

bool Operator::operator==(const Operator& other) const {
    if (n() != other.n() || N() != other.N() || K() != other.K()) return false;
    for (int a = 0; a < n(); ++a)
        if (coeffs_[a] != other.coeffs_[a]) return false;
    return true;
}

namespace {

Operator make_gradient(int n, int N) {
    std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(N * n, N));
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < N; ++j) c[a](j * n + a, j) = 1.0;
    return Operator(std::move(c), "gradient");
}

Operator make_symgrad(int n, bool deviatoric) {
    std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(n * n, n));
    for (int a = 0; a < n; ++a) {
        for (int j = 0; j < n; ++j) {
            // (v (x) z)_{jk} = (v_j z_k + v_k z_j)/2, coefficient of z_a v_i.
            c[a](j * n + a, j) += 0.5;
            c[a](a * n + j, j) += 0.5;
        }
        if (deviatoric)
            for (int j = 0; j < n; ++j) c[a](j * n + j, a) -= 1.0 / n;
    }
    return Operator(std::move(c), deviatoric ? "devsymgrad" : "symgrad");
}

Operator make_remark25() {
    // Rows of the 2x3 target, flattened row-major:
    //   [ (d1u1 - d2u2)/2, (d1u2 + d2u1)/2, d3u1 ]
    //   [ (d1u2 + d2u1)/2, (d1u1 - d2u2)/2, d3u2 ]
    std::vector<Eigen::MatrixXd> c(3, Eigen::MatrixXd::Zero(6, 2));
    c[0](0, 0) = 0.5;
    c[1](0, 1) = -0.5;
    c[0](1, 1) = 0.5;
    c[1](1, 0) = 0.5;
    c[2](2, 0) = 1.0;
    c[0](3, 1) = 0.5;
    c[1](3, 0) = 0.5;
    c[0](4, 0) = 0.5;
    c[1](4, 1) = -0.5;
    c[2](5, 1) = 1.0;
    return Operator(std::move(c), "remark25");
}

Operator make_d1only(int n) {
    std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(1, 1));
    c[0](0, 0) = 1.0;
    return Operator(std::move(c), "d1only");
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& s, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError("expected integer, got '" + s + "'", line);
    return v;
}

}  // namespace

Operator builtin(std::string_view name, int n, int N) {
    if (n < 1) throw DimensionError("space dimension must be positive");
    if (name == "gradient") return make_gradient(n, N <= 0 ? 1 : N);
    if (name == "symgrad" || name == "devsymgrad") {
        if (N > 0 && N != n) throw DimensionError(std::string(name) + " requires N = n");
        if (name == "devsymgrad" && n < 2) throw DimensionError("devsymgrad requires n >= 2");
        return make_symgrad(n, name == "devsymgrad");
    }
    if (name == "remark25") {
        if (n != 3 || (N > 0 && N != 2)) throw DimensionError("remark25 is defined for n = 3, N = 2 only");
        return make_remark25();
    }
    if (name == "d1only") {
        if (N > 0 && N != 1) throw DimensionError("d1only is scalar (N = 1)");
        return make_d1only(n);
    }
    throw Error("unknown builtin operator '" + std::string(name) + "'");
}

Operator load_operator(std::string_view source) {
    constexpr std::string_view prefix = "builtin:";
    if (source.substr(0, prefix.size()) != prefix) return parse_operator_file(std::filesystem::path(source));
    std::vector<std::string> parts;
    std::string rest(source.substr(prefix.size()));
    std::stringstream ss(rest);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
    if (parts.size() < 2 || parts.size() > 3)
        throw ParseError("builtin operator syntax is builtin:NAME,n[,N]");
    const int n = parse_int(parts[1], 0);
    const int N = parts.size() == 3 ? parse_int(parts[2], 0) : 0;
    return builtin(parts[0], n, N);
}

Operator parse_operator(std::istream& in) {
    int n = -1, N = -1, K = -1;
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<bool> seen;
    int current = -1;  // block being filled
    int row = 0;
    int block_line = 0;
    int line_no = 0;

    auto finish_block = [&]() {
        if (current >= 0 && row != K)
            throw ParseError("block A" + std::to_string(current + 1) + " has " + std::to_string(row) +
                                 " rows, expected K=" + std::to_string(K),
                             block_line);
    };

    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (const auto eq = line.find('='); eq != std::string::npos) {
            if (current >= 0) throw ParseError("header after coefficient blocks", line_no);
            const std::string key = trim(line.substr(0, eq));
            const int value = parse_int(trim(line.substr(eq + 1)), line_no);
            if (value <= 0) throw ParseError(key + " must be positive", line_no);
            if (key == "n") n = value;
            else if (key == "N") N = value;
            else if (key == "K") K = value;
            else throw ParseError("unknown header key '" + key + "'", line_no);
            continue;
        }
        if (line.back() == ':') {
            if (n < 0 || N < 0 || K < 0) throw ParseError("n, N and K must precede coefficient blocks", line_no);
            if (blocks.empty()) {
                blocks.assign(n, Eigen::MatrixXd::Zero(K, N));
                seen.assign(n, false);
            }
            finish_block();
            const std::string label = line.substr(0, line.size() - 1);
            if (label.size() < 2 || label[0] != 'A') throw ParseError("expected block label A<alpha>:", line_no);
            const int alpha = parse_int(label.substr(1), line_no);
            if (alpha < 1 || alpha > n)
                throw ParseError("block index " + std::to_string(alpha) + " outside 1.." + std::to_string(n),
                                 line_no);
            if (seen[alpha - 1]) throw ParseError("duplicate block A" + std::to_string(alpha), line_no);
            seen[alpha - 1] = true;
            current = alpha - 1;
            row = 0;
            block_line = line_no;
            continue;
        }
        if (current < 0) throw ParseError("matrix row outside a coefficient block", line_no);
        if (row >= K)
            throw ParseError("block A" + std::to_string(current + 1) + " has more than K=" + std::to_string(K) +
                                 " rows",
                             line_no);
        std::istringstream rs(line);
        std::vector<double> values;
        for (std::string tok; rs >> tok;) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                throw ParseError("non-numeric token '" + tok + "'", line_no);
            values.push_back(v);
        }
        if (static_cast<int>(values.size()) != N)
            throw ParseError("row has " + std::to_string(values.size()) + " entries, expected N=" + std::to_string(N),
                             line_no);
        for (int c = 0; c < N; ++c) blocks[current](row, c) = values[c];
        ++row;
    }
    if (n < 0 || N < 0 || K < 0) throw ParseError("missing n, N or K header", line_no);
    if (blocks.empty()) throw ParseError("no coefficient blocks", line_no);
    finish_block();
    for (int a = 0; a < n; ++a)
        if (!seen[a]) throw ParseError("missing block A" + std::to_string(a + 1), line_no);
    return Operator(std::move(blocks));
}

Operator parse_operator_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open operator file '" + path.string() + "'");
    return parse_operator(in);
}

std::string format_operator(const Operator& op) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << op.n() << "\nN=" << op.N() << "\nK=" << op.K() << "\n";
    for (int a = 0; a < op.n(); ++a) {
        os << "A" << a + 1 << ":\n";
        for (int r = 0; r < op.K(); ++r) {
            for (int c = 0; c < op.N(); ++c) os << (c ? " " : "") << op.coeff(a)(r, c);
            os << "\n";
        }
    }
    return os.str();
}

Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, double tol) {
    if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return Eigen::MatrixXd(m.rows(), 0);
    int r = 0;
    while (r < s.size() && s[r] > tol * s[0]) ++r;
    return svd.matrixU().leftCols(r);
}

double ConeSample::max_generator_residual() const {
    const Eigen::MatrixXd proj = effective_range * (effective_range.transpose() * generators);
    return generators.cols() ? (generators - proj).colwise().norm().maxCoeff() : 0.0;
}

ConeSample cone_and_range(const Operator& op, int samples, std::uint64_t seed) {
    const int n = op.n(), N = op.N(), K = op.K();
    if (samples < K * N) throw DimensionError("cone sampling needs at least K*N samples");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const int m = samples + N * n;
    ConeSample out;
    out.generators.resize(K, m);
    out.vs.resize(N, m);
    out.zs.resize(n, m);
    int col = 0;
    for (int i = 0; i < N; ++i)
        for (int a = 0; a < n; ++a, ++col) {
            out.vs.col(col) = Eigen::VectorXd::Unit(N, i);
            out.zs.col(col) = Eigen::VectorXd::Unit(n, a);
        }
    for (; col < m; ++col) {
        for (int i = 0; i < N; ++i) out.vs(i, col) = gauss(rng);
        for (int a = 0; a < n; ++a) out.zs(a, col) = gauss(rng);
    }
    for (int c = 0; c < m; ++c) out.generators.col(c) = op.pairing(out.vs.col(c), out.zs.col(c));
    out.effective_range = orthonormal_span(out.generators);
    return out;
}

}  // namespace bva
