#include "avgh/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avgh/errors.hpp"

namespace avgh {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_number(z.real());
  std::string im = format_number(std::abs(z.imag())) + "i";
  if (z.real() == 0.0) return (z.imag() < 0 ? "-" : "") + im;
  return format_number(z.real()) + (z.imag() < 0 ? "-" : "+") + im;
}

std::string format_matrix(const Mat& m) {
  std::string out;
  for (Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += "; ";
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_complex(m(r, c));
    }
  }
  return out;
}

std::string format_vector(const Vec& v) {
  std::string out;
  for (Index k = 0; k < v.size(); ++k) {
    if (k > 0) out += ' ';
    out += format_complex(v(k));
  }
  return out;
}

namespace {

double parse_real(const std::string& s, const std::string& token) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  std::size_t start = s[0] == '+' ? 1 : 0;
  double v = 0.0;
  const char* first = s.data() + start;
  const char* last = s.data() + s.size();
  if (std::string_view(first, last) == "inf") return INFINITY;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw ParseError("bad number '" + token + "'");
  return v;
}

}  // namespace

cplx parse_complex(const std::string& token) {
  if (token.empty()) throw ParseError("empty number");
  if (token.back() != 'i') return {parse_real(token, token), 0.0};
  const std::string body = token.substr(0, token.size() - 1);
  // split at the last sign that is not part of an exponent and not leading
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    if (body.empty()) return {0.0, 1.0};
    return {0.0, parse_real(body, token)};
  }
  return {parse_real(body.substr(0, split), token), parse_real(body.substr(split), token)};
}

Mat parse_matrix(const std::string& text) {
  std::vector<std::vector<cplx>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::stringstream es(row);
    std::string tok;
    std::vector<cplx> entries;
    while (es >> tok) entries.push_back(parse_complex(tok));
    if (entries.empty() && rows.empty() && rs.eof()) break;
    if (entries.empty()) throw ParseError("empty matrix row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw ParseError("empty matrix");
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw ValidationError("matrix row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                            " entries, expected " + std::to_string(rows[0].size()));
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace avgh
