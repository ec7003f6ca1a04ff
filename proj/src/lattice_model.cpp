#include "gapbound/lattice_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>
#include <utility>

#include "gapbound/errors.hpp"

namespace gapbound {
namespace {

constexpr double kHermitianTol = 1e-12;

bool finite(const Block& b) {
  return b.allFinite();
}

const HoppingBlock* find_block(const ModelSpec& spec, int x, int x_prime) {
  if (x > x_prime) std::swap(x, x_prime);
  for (const auto& b : spec.hopping) {
    if (b.x == x && b.x_prime == x_prime) return &b;
  }
  return nullptr;
}

double spectral_norm(const Block& h) {
  if (h.size() == 0) return 0.0;
  if (h.rows() == 1 && h.cols() == 1) return std::abs(h(0, 0));
  Eigen::JacobiSVD<Block> svd(h);
  return svd.singularValues()(0);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double HoppingEnvelope::operator()(int distance) const {
  return cv * std::exp(-mu * std::abs(distance));
}

void validate(const ModelSpec& spec) {
  if (spec.L < 1) throw ValidationError("L must be at least 1");
  if (spec.n0 < 1) throw ValidationError("N0 must be at least 1");

  std::set<std::pair<int, int>> pairs;
  for (const auto& b : spec.hopping) {
    if (b.x < 1 || b.x_prime > spec.L || b.x >= b.x_prime) {
      throw ValidationError("hopping pair (" + std::to_string(b.x) + ", " +
                            std::to_string(b.x_prime) +
                            ") must satisfy 1 <= x < x' <= L");
    }
    if (b.h.rows() != spec.n0 || b.h.cols() != spec.n0) {
      throw ValidationError("hopping block shape must be N0 x N0");
    }
    if (!finite(b.h)) throw ValidationError("non-finite hopping entry");
    if (!pairs.emplace(b.x, b.x_prime).second) {
      throw ValidationError("duplicate hopping pair (" + std::to_string(b.x) +
                            ", " + std::to_string(b.x_prime) + ")");
    }
  }

  std::set<int> sites;
  for (const auto& o : spec.onsite) {
    if (o.x < 1 || o.x > spec.L) {
      throw ValidationError("onsite coordinate " + std::to_string(o.x) +
                            " out of range");
    }
    if (o.v.rows() != spec.n0 || o.v.cols() != spec.n0) {
      throw ValidationError("onsite block shape must be N0 x N0");
    }
    if (!finite(o.v)) throw ValidationError("non-finite onsite entry");
    if (!sites.insert(o.x).second) {
      throw ValidationError("duplicate onsite block at x = " +
                            std::to_string(o.x));
    }
    const double err = (o.v - o.v.adjoint()).cwiseAbs().maxCoeff();
    if (err > kHermitianTol) {
      throw NonHermitian("onsite block at x = " + std::to_string(o.x) +
                         " is not Hermitian");
    }
  }
}

Eigen::MatrixXcd assemble(const ModelSpec& spec) {
  validate(spec);
  const int n0 = spec.n0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(spec.dimension(), spec.dimension());
  for (const auto& b : spec.hopping) {
    const int r = (b.x - 1) * n0;
    const int c = (b.x_prime - 1) * n0;
    m.block(r, c, n0, n0) = b.h;
    m.block(c, r, n0, n0) = b.h.adjoint();
  }
  for (const auto& o : spec.onsite) {
    const int r = (o.x - 1) * n0;
    // Symmetrize so the result is exactly Hermitian even when the block is
    // only Hermitian to within the validation tolerance.
    m.block(r, r, n0, n0) = 0.5 * (o.v + o.v.adjoint());
  }
  return m;
}

double block_norm(const ModelSpec& spec, int x, int x_prime) {
  if (x == x_prime) {
    throw ValidationError("block_norm requires distinct coordinates");
  }
  const auto* b = find_block(spec, x, x_prime);
  return b ? spectral_norm(b->h) : 0.0;
}

HoppingEnvelope fit_envelope(const ModelSpec& spec, double mu) {
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (spec.hopping.empty()) {
    throw ValidationError("cannot fit an envelope without off-diagonal blocks");
  }
  double cv = 0.0;
  for (const auto& b : spec.hopping) {
    cv = std::max(cv, spectral_norm(b.h) * std::exp(mu * (b.x_prime - b.x)));
  }
  if (!(cv > 0.0)) {
    throw ValidationError("all off-diagonal blocks vanish; envelope undefined");
  }
  return {cv, mu};
}

void check_envelope(const ModelSpec& spec, const HoppingEnvelope& envelope) {
  if (!(envelope.cv > 0.0) || !(envelope.mu > 0.0)) {
    throw ValidationError("envelope requires Cv > 0 and mu > 0");
  }
  std::ostringstream offenders;
  int count = 0;
  for (const auto& b : spec.hopping) {
    const double allowed = envelope(b.x_prime - b.x);
    if (spectral_norm(b.h) > allowed * (1.0 + 1e-12)) {
      if (count++ < 8) offenders << " (" << b.x << "," << b.x_prime << ")";
    }
  }
  if (count > 0) {
    throw EnvelopeViolation(std::to_string(count) +
                            " hopping block(s) exceed the declared envelope:" +
                            offenders.str());
  }
}

NNBound check_nearest_neighbor(const ModelSpec& spec) {
  NNBound out;
  std::ostringstream offenders;
  int count = 0;
  for (const auto& b : spec.hopping) {
    if (b.x_prime - b.x >= 2) {
      if (!b.h.isZero(0.0)) {
        if (count++ < 8) offenders << " (" << b.x << "," << b.x_prime << ")";
      }
    } else {
      out.v0 = std::max(out.v0, spectral_norm(b.h));
    }
  }
  if (count > 0) {
    throw LongRangeHopping(std::to_string(count) +
                           " pair(s) hop beyond nearest neighbours:" +
                           offenders.str());
  }
  return out;
}

ModelSpec impurity_model(int L, double h0) {
  if (L < 2 || L % 2 != 0) {
    throw ValidationError("impurity model needs an even L >= 2, got " +
                          std::to_string(L));
  }
  ModelSpec spec;
  spec.L = L + 1;
  spec.n0 = 1;
  spec.label = "impurity L=" + std::to_string(L) + " h0=" + fmt_double(h0);
  spec.hopping.reserve(L);
  for (int x = 1; x <= L; ++x) {
    spec.hopping.push_back({x, x + 1, Block::Constant(1, 1, Complex(1.0))});
  }
  spec.onsite.push_back({impurity_center(L), Block::Constant(1, 1, Complex(h0))});
  return spec;
}

ModelSpec flatten_strip(const StripLattice& strip) {
  if (strip.width < 1 || strip.length < 1) {
    throw ValidationError("strip dimensions must be positive");
  }
  const auto cells = static_cast<std::size_t>(strip.width) * strip.length;
  if (!strip.potential.empty() && strip.potential.size() != cells) {
    throw ValidationError("strip potential must have width*length entries");
  }
  ModelSpec spec;
  spec.L = strip.length;
  spec.n0 = strip.width;
  spec.label = "strip " + std::to_string(strip.width) + "x" +
               std::to_string(strip.length);
  for (int x = 1; x <= strip.length; ++x) {
    Block v = Block::Zero(strip.width, strip.width);
    for (int r = 0; r + 1 < strip.width; ++r) {
      v(r, r + 1) = strip.hop_across;
      v(r + 1, r) = std::conj(strip.hop_across);
    }
    if (!strip.potential.empty()) {
      for (int r = 0; r < strip.width; ++r) {
        v(r, r) = strip.potential[static_cast<std::size_t>(x - 1) * strip.width + r];
      }
    }
    spec.onsite.push_back({x, std::move(v)});
    if (x < strip.length) {
      Block h = Block::Identity(strip.width, strip.width) * strip.hop_along;
      spec.hopping.push_back({x, x + 1, std::move(h)});
    }
  }
  return spec;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

int parse_int(std::string_view tok, int line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected integer for ") + what +
                               ", got '" + std::string(tok) + "'");
  }
  return v;
}

double parse_real(std::string_view tok, int line, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("expected real for ") + what +
                               ", got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

ModelSpec parse_model(std::istream& in) {
  ModelSpec spec;
  spec.L = 0;
  spec.n0 = 0;
  std::map<int, Block> onsite;
  std::map<std::pair<int, int>, Block> hopping;
  std::set<std::tuple<int, int, int>> seen_v;
  std::set<std::tuple<int, int, int, int>> seen_t;

  auto require_header = [&](int line) {
    if (spec.L < 1 || spec.n0 < 1) {
      throw ParseError(line, "L and N0 must be declared before V/T entries");
    }
  };
  auto check_internal = [&](int v, int line, const char* what) {
    if (v < 1 || v > spec.n0) {
      throw ParseError(line, std::string(what) + " out of range 1..N0");
    }
  };
  auto check_site = [&](int v, int line, const char* what) {
    if (v < 1 || v > spec.L) {
      throw ParseError(line, std::string(what) + " out of range 1..L");
    }
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#') continue;
    const auto tok = split_ws(raw);
    const std::string_view key = tok[0];

    if (key == "L" || key == "N0") {
      if (tok.size() != 2) throw ParseError(line, std::string(key) + " takes one integer");
      const int v = parse_int(tok[1], line, std::string(key).c_str());
      if (v < 1) throw ParseError(line, std::string(key) + " must be positive");
      int& slot = key == "L" ? spec.L : spec.n0;
      if (slot != 0) throw ParseError(line, std::string(key) + " declared twice");
      if (!onsite.empty() || !hopping.empty()) {
        throw ParseError(line, "header must precede V/T entries");
      }
      slot = v;
    } else if (key == "label") {
      const auto rest = raw.find_first_not_of(" \t", raw.find("label") + 5);
      spec.label = rest == std::string::npos ? std::string() : raw.substr(rest);
    } else if (key == "V") {
      require_header(line);
      if (tok.size() != 6) throw ParseError(line, "V expects: V x i j re im");
      const int x = parse_int(tok[1], line, "x");
      const int i = parse_int(tok[2], line, "i");
      const int j = parse_int(tok[3], line, "j");
      const double re = parse_real(tok[4], line, "re");
      double im = parse_real(tok[5], line, "im");
      check_site(x, line, "x");
      check_internal(i, line, "i");
      check_internal(j, line, "j");
      if (i > j) throw ParseError(line, "onsite entries require i <= j");
      if (i == j) {
        if (std::abs(im) > kHermitianTol) {
          throw ParseError(line, "diagonal onsite entry must be real");
        }
        im = 0.0;
      }
      if (!seen_v.emplace(x, i, j).second) {
        throw ParseError(line, "duplicate onsite entry");
      }
      auto [it, fresh] = onsite.try_emplace(x, Block::Zero(spec.n0, spec.n0));
      it->second(i - 1, j - 1) = Complex(re, im);
      it->second(j - 1, i - 1) = Complex(re, -im);
    } else if (key == "T") {
      require_header(line);
      if (tok.size() != 7) throw ParseError(line, "T expects: T x x' i j re im");
      const int x = parse_int(tok[1], line, "x");
      const int xp = parse_int(tok[2], line, "x'");
      const int i = parse_int(tok[3], line, "i");
      const int j = parse_int(tok[4], line, "j");
      const double re = parse_real(tok[5], line, "re");
      const double im = parse_real(tok[6], line, "im");
      check_site(x, line, "x");
      check_site(xp, line, "x'");
      check_internal(i, line, "i");
      check_internal(j, line, "j");
      if (x >= xp) throw ParseError(line, "hopping entries require x < x'");
      if (!seen_t.emplace(x, xp, i, j).second) {
        throw ParseError(line, "duplicate hopping entry");
      }
      auto [it, fresh] =
          hopping.try_emplace({x, xp}, Block::Zero(spec.n0, spec.n0));
      it->second(i - 1, j - 1) = Complex(re, im);
    } else {
      throw ParseError(line, "unknown record '" + std::string(key) + "'");
    }
  }
  if (spec.L < 1 || spec.n0 < 1) {
    throw ParseError(line, "missing L or N0 header");
  }
  for (auto& [x, v] : onsite) spec.onsite.push_back({x, std::move(v)});
  for (auto& [xx, h] : hopping) spec.hopping.push_back({xx.first, xx.second, std::move(h)});
  validate(spec);
  return spec;
}

ModelSpec read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  return parse_model(in);
}

void write_model(std::ostream& out, const ModelSpec& spec) {
  validate(spec);
  out << "L " << spec.L << "\nN0 " << spec.n0 << "\n";
  if (!spec.label.empty()) out << "label " << spec.label << "\n";
  auto onsite = spec.onsite;
  std::sort(onsite.begin(), onsite.end(),
            [](const auto& a, const auto& b) { return a.x < b.x; });
  for (const auto& o : onsite) {
    for (int i = 0; i < spec.n0; ++i) {
      for (int j = i; j < spec.n0; ++j) {
        const Complex z = i == j ? Complex(o.v(i, i).real(), 0.0) : o.v(i, j);
        out << "V " << o.x << ' ' << i + 1 << ' ' << j + 1 << ' '
            << fmt_double(z.real()) << ' ' << fmt_double(z.imag()) << "\n";
      }
    }
  }
  auto hopping = spec.hopping;
  std::sort(hopping.begin(), hopping.end(), [](const auto& a, const auto& b) {
    return std::pair(a.x, a.x_prime) < std::pair(b.x, b.x_prime);
  });
  for (const auto& b : hopping) {
    for (int i = 0; i < spec.n0; ++i) {
      for (int j = 0; j < spec.n0; ++j) {
        out << "T " << b.x << ' ' << b.x_prime << ' ' << i + 1 << ' ' << j + 1
            << ' ' << fmt_double(b.h(i, j).real()) << ' '
            << fmt_double(b.h(i, j).imag()) << "\n";
      }
    }
  }
}

}  // namespace gapbound
