#include "sbren/fock.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sbren {

namespace {

// C(n, k) with saturation at `ceiling`.
std::uint64_t binom_saturating(std::size_t n, std::size_t k, std::uint64_t ceiling) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays exact because r = C(n-k+i-1, i-1); r never
        // exceeds ceiling here, so the product only overflows for absurd n
        const std::uint64_t factor = n - k + i;
        if (r > std::numeric_limits<std::uint64_t>::max() / factor) return ceiling;
        const std::uint64_t next = r * factor / i;
        if (next > ceiling) return ceiling;
        r = next;
    }
    return r;
}

} // namespace

std::size_t fock_dimension(std::size_t modes, std::size_t n_max, std::size_t cap) {
    if (modes == 0) return 1;
    // sum_{n<=n_max} C(M+n-1, n) = C(M+n_max, n_max)
    const auto d = binom_saturating(modes + n_max, n_max, static_cast<std::uint64_t>(cap) + 1);
    return static_cast<std::size_t>(d);
}

FockBasis::FockBasis(std::size_t modes, std::size_t n_max, std::size_t cap)
    : modes_(modes), n_max_(n_max) {
    if (modes == 0) throw std::invalid_argument("FockBasis: need at least one mode");
    dimension_ = fock_dimension(modes, n_max, cap);
    if (dimension_ > cap)
        throw SizingError("FockBasis: dimension for M=" + std::to_string(modes) + ", n_max=" +
                          std::to_string(n_max) + " exceeds the cap " + std::to_string(cap));

    const std::size_t rows = modes_ + n_max_ + 1;
    const std::size_t cols = n_max_ + 2;
    pascal_.assign(rows * cols, 0);
    for (std::size_t n = 0; n < rows; ++n) {
        pascal_[n * cols] = 1;
        for (std::size_t k = 1; k < cols && k <= n; ++k)
            pascal_[n * cols + k] = pascal_[(n - 1) * cols + k - 1] + (k < n ? pascal_[(n - 1) * cols + k] : 0);
    }

    offsets_.assign(n_max_ + 2, 0);
    for (std::size_t n = 0; n <= n_max_; ++n) offsets_[n + 1] = offsets_[n] + binom(modes_ + n - 1, n);

    flat_offsets_.reserve(dimension_ + 1);
    std::size_t total = 0;
    for (std::size_t n = 0; n <= n_max_; ++n) total += n * (offsets_[n + 1] - offsets_[n]);
    flat_modes_.reserve(total);
    flat_offsets_.push_back(0);
    for (std::size_t n = 0; n <= n_max_; ++n) {
        std::vector<std::uint32_t> cur(n, 0);
        const auto count = offsets_[n + 1] - offsets_[n];
        for (std::size_t c = 0; c < count; ++c) {
            flat_modes_.insert(flat_modes_.end(), cur.begin(), cur.end());
            flat_offsets_.push_back(flat_modes_.size());
            // next nondecreasing list: bump the last entry that can grow
            std::size_t p = n;
            while (p > 0 && cur[p - 1] + 1 >= modes_) --p;
            if (p == 0) break;
            const auto v = cur[p - 1] + 1;
            for (std::size_t q = p - 1; q < n; ++q) cur[q] = v;
        }
    }
}

std::uint64_t FockBasis::binom(std::size_t n, std::size_t k) const {
    const std::size_t cols = n_max_ + 2;
    if (k > n || k >= cols || n > modes_ + n_max_) return k > n ? 0 : binom_saturating(n, k, ~0ULL);
    return pascal_[n * cols + k];
}

std::size_t FockBasis::sector_of(std::size_t index) const {
    if (index >= dimension_) throw std::out_of_range("FockBasis::sector_of: index out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::span<const std::uint32_t> FockBasis::modes_of(std::size_t index) const {
    if (index >= dimension_) throw std::out_of_range("FockBasis::modes_of: index out of range");
    return {flat_modes_.data() + flat_offsets_[index], flat_offsets_[index + 1] - flat_offsets_[index]};
}

std::vector<std::uint32_t> FockBasis::occupation(std::size_t index) const {
    std::vector<std::uint32_t> occ(modes_, 0);
    for (auto i : modes_of(index)) ++occ[i];
    return occ;
}

std::size_t FockBasis::index_of(std::span<const std::uint32_t> v) const {
    const std::size_t n = v.size();
    if (n > n_max_) throw std::out_of_range("FockBasis::index_of: boson number above n_max");
    std::size_t rank = offsets_[n];
    std::uint32_t prev = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (v[p] >= modes_ || v[p] < prev)
            throw std::invalid_argument("FockBasis::index_of: mode list must be sorted and in range");
        // lists sharing the prefix with a smaller entry u in [prev, v_p) at
        // position p; hockey stick: sum_u C(M-u+r-1, r) = C(M-prev+r, r+1) - C(M-v_p+r, r+1)
        const std::size_t r = n - p - 1;
        rank += binom(modes_ - prev + r, r + 1) - binom(modes_ - v[p] + r, r + 1);
        prev = v[p];
    }
    return rank;
}

std::size_t FockBasis::index_of_occupation(std::span<const std::uint32_t> occ) const {
    if (occ.size() != modes_) throw std::invalid_argument("FockBasis::index_of_occupation: wrong length");
    std::vector<std::uint32_t> v;
    for (std::uint32_t i = 0; i < modes_; ++i) v.insert(v.end(), occ[i], i);
    return index_of(v);
}

CVector vacuum(const FockBasis& basis) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v[0] = 1.0;
    return v;
}

std::vector<double> free_energies(const ModeGrid& grid, const FockBasis& basis) {
    if (grid.size() != basis.modes())
        throw std::invalid_argument("free_energies: grid and basis have different mode counts");
    const auto om = grid.dispersion();
    std::vector<double> e(basis.dimension(), 0.0);
    for (std::size_t s = 0; s < basis.dimension(); ++s) {
        double acc = 0.0;
        for (auto i : basis.modes_of(s)) acc += om[i];
        e[s] = acc;
    }
    return e;
}

double fock_scale_norm(const CVector& psi, double s, const ModeGrid& grid, const FockBasis& basis) {
    if (static_cast<std::size_t>(psi.size()) != basis.dimension())
        throw std::invalid_argument("fock_scale_norm: state does not match the basis");
    const auto e = free_energies(grid, basis);
    double acc = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) acc += std::pow(1.0 + e[k], s) * std::norm(psi[static_cast<Eigen::Index>(k)]);
    return std::sqrt(acc);
}

void write_state(std::ostream& out, const FockBasis& basis, const CVector& psi) {
    if (static_cast<std::size_t>(psi.size()) != basis.dimension())
        throw std::invalid_argument("write_state: state does not match the basis");
    char buf[64];
    for (std::size_t k = 0; k < basis.dimension(); ++k) {
        const Complex c = psi[static_cast<Eigen::Index>(k)];
        if (c == Complex{}) continue;
        for (auto n : basis.occupation(k)) out << n << ' ';
        auto r = std::to_chars(buf, buf + sizeof buf, c.real(), std::chars_format::general, 17);
        out.write(buf, r.ptr - buf);
        out << ' ';
        r = std::to_chars(buf, buf + sizeof buf, c.imag(), std::chars_format::general, 17);
        out.write(buf, r.ptr - buf);
        out << '\n';
    }
}

CVector read_state(std::istream& in, const FockBasis& basis) {
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        std::vector<std::uint32_t> occ(basis.modes());
        for (auto& n : occ)
            if (!(ls >> n)) throw std::invalid_argument("read_state: bad occupation on line " + std::to_string(lineno));
        double re = 0, im = 0;
        if (!(ls >> re >> im)) throw std::invalid_argument("read_state: bad coefficient on line " + std::to_string(lineno));
        std::size_t total = 0;
        for (auto n : occ) total += n;
        if (total > basis.n_max()) throw std::invalid_argument("read_state: state above n_max on line " + std::to_string(lineno));
        psi[static_cast<Eigen::Index>(basis.index_of_occupation(occ))] += Complex{re, im};
    }
    return psi;
}

} // namespace sbren
