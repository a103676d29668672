#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oracle {

std::vector<double> jacobi_singular_values(mano::Matrix a) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          alpha += a(r, i) * a(r, i);
          beta += a(r, j) * a(r, j);
          gamma += a(r, i) * a(r, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < n; ++r) {
          const double ai = a(r, i);
          const double aj = a(r, j);
          a(r, i) = c * ai - s * aj;
          a(r, j) = s * ai + c * aj;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += a(r, j) * a(r, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

namespace {

struct Edge {
  std::size_t to;
  double cap;
  double cost;
  std::size_t rev;
};

}  // namespace

double exact_transport_cost(const mano::Matrix& cost, std::span<const double> mu, std::span<const double> nu) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t source = 0, sink = n + m + 1, nodes = n + m + 2;
  std::vector<std::vector<Edge>> g(nodes);
  auto add = [&](std::size_t u, std::size_t v, double cap, double c) {
    g[u].push_back({v, cap, c, g[v].size()});
    g[v].push_back({u, 0.0, -c, g[u].size() - 1});
  };
  for (std::size_t i = 0; i < n; ++i) add(source, 1 + i, mu[i], 0.0);
  for (std::size_t j = 0; j < m; ++j) add(1 + n + j, sink, nu[j], 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) add(1 + i, 1 + n + j, 2.0, cost(i, j));

  constexpr double kEps = 1e-15;
  double total = 0.0;
  for (int round = 0; round < 10000; ++round) {
    std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev_node(nodes), prev_edge(nodes);
    dist[source] = 0.0;
    for (std::size_t pass = 0; pass + 1 < nodes; ++pass) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (!std::isfinite(dist[u])) continue;
        for (std::size_t e = 0; e < g[u].size(); ++e) {
          const Edge& edge = g[u][e];
          if (edge.cap > kEps && dist[u] + edge.cost < dist[edge.to] - 1e-14) {
            dist[edge.to] = dist[u] + edge.cost;
            prev_node[edge.to] = u;
            prev_edge[edge.to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (!std::isfinite(dist[sink])) break;
    double push = std::numeric_limits<double>::infinity();
    for (std::size_t v = sink; v != source; v = prev_node[v]) push = std::min(push, g[prev_node[v]][prev_edge[v]].cap);
    if (push <= kEps) break;
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      Edge& edge = g[prev_node[v]][prev_edge[v]];
      edge.cap -= push;
      g[v][edge.rev].cap += push;
    }
    total += push * dist[sink];
  }
  return total;
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> brute_force_ranks(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (double v : x) {
      if (v < x[i]) less += 1.0;
      if (v == x[i]) equal += 1.0;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Line normal_equation_fit(std::span<const double> x, std::span<const double> y) {
  // [n  Sx ] [b]   [Sy ]
  // [Sx Sxx] [a] = [Sxy]
  double n = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    n += 1.0;
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

std::vector<double> central_differences(const std::function<double(std::span<const double>)>& f,
                                        std::vector<double> at, double h) {
  std::vector<double> grad(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double saved = at[i];
    at[i] = saved + h;
    const double up = f(at);
    at[i] = saved - h;
    const double down = f(at);
    at[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<std::uint8_t> handmade_npy(const std::string& descr, bool fortran_order, const std::string& shape_tuple,
                                       std::span<const std::uint8_t> payload) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': " + (fortran_order ? "True" : "False") +
                     ", 'shape': " + shape_tuple + ", }";
  std::size_t header_len = dict.size() + 1;
  while ((10 + header_len) % 64 != 0) ++header_len;
  dict.append(header_len - dict.size() - 1, ' ');
  dict.push_back('\n');

  std::vector<std::uint8_t> out{0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
  out.push_back(static_cast<std::uint8_t>(header_len & 0xFF));
  out.push_back(static_cast<std::uint8_t>(header_len >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<double> naive_softmax(std::span<const double> q) {
  std::vector<double> e(q.size());
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += (e[k] = std::exp(q[k]));
  for (double& v : e) v /= s;
  return e;
}

mano::Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  mano::Matrix m(rows, cols);
  for (double& v : m.values()) v = dist(gen);
  return m;
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("mano-test-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace oracle
