#include "neurocnn/conv.hpp"

#include <charconv>
#include <sstream>

namespace neurocnn {

int Architecture::total_filter_size() const {
  int total = 0;
  for (int ki : k) total += ki;
  return total;
}

int Architecture::output_degree() const {
  return static_cast<int>(ipow(r, layers() - 1));
}

std::vector<int> Architecture::filter_degrees() const {
  std::vector<int> m(k.size());
  for (int i = 0; i < layers(); ++i) m[static_cast<std::size_t>(i)] = static_cast<int>(ipow(r, layers() - 1 - i));
  return m;
}

int Architecture::total_stride() const {
  int prod = 1;
  for (int si : s) prod *= si;
  return prod;
}

int Architecture::receptive_field() const {
  int width = 1;
  int stride_prod = 1;
  for (int i = 0; i < layers(); ++i) {
    width += (k[static_cast<std::size_t>(i)] - 1) * stride_prod;
    stride_prod *= s[static_cast<std::size_t>(i)];
  }
  return width;
}

Architecture validate_architecture(int d0, std::vector<int> k, std::vector<int> s, int r) {
  if (k.empty() || k.size() != s.size()) {
    throw Error(ErrorCode::ShapeMismatch, "need L >= 1 filter sizes and as many strides");
  }
  if (r < 1) throw Error(ErrorCode::ShapeMismatch, "activation exponent r must be >= 1");
  if (d0 < 1) throw Error(ErrorCode::NonPositiveWidth, "input width must be >= 1");
  Architecture arch;
  arch.r = r;
  arch.d.push_back(d0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 1 || s[i] < 1) {
      throw Error(ErrorCode::ShapeMismatch, "filter sizes and strides must be >= 1");
    }
    const int di = arch.d.back();
    if (di - k[i] < 0) {
      throw Error(ErrorCode::NonPositiveWidth,
                  "layer " + std::to_string(i) + " input narrower than its filter");
    }
    if ((di - k[i]) % s[i] != 0) {
      throw Error(ErrorCode::NonIntegralWidth,
                  "layer " + std::to_string(i) + ": (d_i - k_i) not divisible by s_i");
    }
    arch.d.push_back((di - k[i]) / s[i] + 1);
  }
  arch.k = std::move(k);
  arch.s = std::move(s);
  return arch;
}

namespace {

int parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_int(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

Architecture parse_architecture(const std::string& text) {
  int d0 = -1;
  int r = -1;
  std::vector<int> k;
  std::vector<int> s;
  bool seen_k = false;
  bool seen_s = false;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string_view field = rest.substr(0, semi);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "expected key=value in '" + std::string(field) + "'");
    }
    const std::string_view key = field.substr(0, eq);
    const std::string_view value = field.substr(eq + 1);
    if (key == "d0") {
      d0 = parse_int(value);
    } else if (key == "r") {
      r = parse_int(value);
    } else if (key == "k") {
      k = parse_int_list(value);
      seen_k = true;
    } else if (key == "s") {
      s = parse_int_list(value);
      seen_s = true;
    } else {
      throw Error(ErrorCode::ParseError, "unknown key '" + std::string(key) + "'");
    }
    if (semi == std::string_view::npos) break;
    rest = rest.substr(semi + 1);
  }
  if (d0 < 0 || r < 0 || !seen_k || !seen_s) {
    throw Error(ErrorCode::ParseError, "architecture needs d0, k, s and r: '" + text + "'");
  }
  return validate_architecture(d0, std::move(k), std::move(s), r);
}

std::string format_architecture(const Architecture& arch) {
  return "d0=" + std::to_string(arch.input_width()) + ";k=" + join(arch.k) + ";s=" + join(arch.s) +
         ";r=" + std::to_string(arch.r);
}

Eigen::MatrixXd toeplitz(std::span<const double> w, int s, int d_out) {
  if (d_out < 1 || s < 1 || w.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "toeplitz: need d_out >= 1, s >= 1, k >= 1");
  }
  const int k = static_cast<int>(w.size());
  const int d_in = s * (d_out - 1) + k;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d_out, d_in);
  for (int i = 0; i < d_out; ++i) {
    for (int j = 0; j < k; ++j) m(i, s * i + j) = w[static_cast<std::size_t>(j)];
  }
  return m;
}

int toeplitz_rank(std::span<const double> w, int s, int d_out) {
  if (!is_nonzero_filter(w)) throw Error(ErrorCode::ZeroFilter, "toeplitz_rank of the zero filter");
  const Eigen::MatrixXd m = toeplitz(w, s, d_out);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace neurocnn
