#include "ramana/sdpa_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace ramana {

namespace {

// Comma/brace/paren separators are equivalent to whitespace, a widespread
// liberty in circulating .dat-s files.
void soften(std::string& s) {
  for (char& ch : s)
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')')
      ch = ' ';
}

bool comment_or_blank(const std::string& s) {
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\r') continue;
    return ch == '"' || ch == '*';
  }
  return true;
}

struct Token {
  std::string text;
  int line;
};

// The header fields of the format are line-oriented only loosely; tokens are
// consumed in order wherever line breaks fall.
class TokenStream {
 public:
  explicit TokenStream(std::istream& in) {
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      last_line_ = line;
      if (comment_or_blank(raw)) continue;
      soften(raw);
      std::istringstream ls(raw);
      std::string tok;
      while (ls >> tok) toks_.push_back(Token{std::move(tok), line});
    }
  }

  bool done() const { return pos_ >= toks_.size(); }
  int line_here() const {
    return done() ? last_line_ + 1 : toks_[pos_].line;
  }
  const Token& take(const char* what) {
    if (done())
      throw ParseError(last_line_ + 1,
                       std::string("unexpected end of file, expected ") +
                           what);
    return toks_[pos_++];
  }

  long take_int(const char* what) {
    const Token& t = take(what);
    const char* s = t.text.c_str();
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0')
      throw ParseError(t.line, std::string("expected ") + what +
                                   ", got '" + t.text + "'");
    return v;
  }

  double take_num(const char* what) {
    const Token& t = take(what);
    const char* s = t.text.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
      throw ParseError(t.line, std::string("expected ") + what +
                                   ", got '" + t.text + "'");
    return v;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_entries(std::ostringstream& os, int matno, const SymMat& f) {
  const int n = f.order();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (f(i, j) != 0.0)
        os << matno << " 1 " << i + 1 << ' ' << j + 1 << ' '
           << num17(f(i, j)) << '\n';
}

bool is_diagonal(const SymMat& x) {
  for (int i = 0; i < x.order(); ++i)
    for (int j = i + 1; j < x.order(); ++j)
      if (x(i, j) != 0.0) return false;
  return true;
}

}  // namespace

SdpInstance parse_sdpa(std::istream& in) {
  TokenStream ts(in);

  int at = ts.line_here();
  const long m = ts.take_int("the constraint count m");
  if (m < 1)
    throw ParseError(at, "constraint count m must be at least 1, got " +
                             std::to_string(m));
  at = ts.line_here();
  const long nblocks = ts.take_int("the number of blocks");
  if (nblocks < 1)
    throw ParseError(at, "block count must be at least 1, got " +
                             std::to_string(nblocks));

  std::vector<int> size(nblocks);    // order of each block
  std::vector<bool> diag(nblocks);   // negative size in the file
  std::vector<int> offset(nblocks);  // start row in the concatenated matrix
  long n = 0;
  for (long b = 0; b < nblocks; ++b) {
    at = ts.line_here();
    const long s = ts.take_int("a block size");
    if (s == 0) throw ParseError(at, "block size 0");
    diag[b] = s < 0;
    size[b] = static_cast<int>(s < 0 ? -s : s);
    offset[b] = static_cast<int>(n);
    n += size[b];
    if (n > 4096)
      throw ParseError(at, "combined block order exceeds 4096");
  }

  Vec csdpa(m);
  for (long i = 0; i < m; ++i) csdpa[i] = ts.take_num("a c entry");

  std::vector<SymMat> f(m + 1, SymMat(static_cast<int>(n)));
  while (!ts.done()) {
    const int at = ts.line_here();
    const long matno = ts.take_int("a matrix index");
    const long blk = ts.take_int("a block index");
    const long i = ts.take_int("a row index");
    const long j = ts.take_int("a column index");
    const double v = ts.take_num("an entry value");
    if (matno < 0 || matno > m)
      throw ParseError(at, "matrix index " + std::to_string(matno) +
                               " out of range 0.." + std::to_string(m));
    if (blk < 1 || blk > nblocks)
      throw ParseError(at, "block index " + std::to_string(blk) +
                               " out of range 1.." + std::to_string(nblocks));
    const int s = size[blk - 1];
    if (i < 1 || i > s || j < 1 || j > s)
      throw ParseError(at, "entry (" + std::to_string(i) + "," +
                               std::to_string(j) + ") outside block " +
                               std::to_string(blk) + " of order " +
                               std::to_string(s));
    if (diag[blk - 1] && i != j)
      throw ParseError(at, "off-diagonal entry in diagonal block " +
                               std::to_string(blk));
    const int a = offset[blk - 1] + static_cast<int>(i < j ? i : j) - 1;
    const int b = offset[blk - 1] + static_cast<int>(i < j ? j : i) - 1;
    f[matno].set(a, b, v);
  }

  std::vector<SymMat> amats;
  amats.reserve(m);
  for (long k = 1; k <= m; ++k) amats.push_back(f[k].scaled(-1.0));
  Vec c(m);
  for (long i = 0; i < m; ++i) c[i] = -csdpa[i];
  return SdpInstance::create(std::move(amats), f[0].scaled(-1.0),
                             std::move(c));
}

SdpInstance parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  return parse_sdpa(in);
}

SdpInstance parse_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_sdpa(in);
}

std::string write_sdpa(const SdpInstance& inst) {
  bool alldiag = is_diagonal(inst.B);
  for (const SymMat& a : inst.A) alldiag = alldiag && is_diagonal(a);

  std::ostringstream os;
  os << "\" sup c^T x s.t. sum_i x_i A_i <= B, stored with F_0 = -B,\n"
     << "\" F_i = -A_i and the objective negated; the file's optimum is\n"
     << "\" therefore the negative of the instance value.\n";
  os << inst.m << '\n' << 1 << '\n'
     << (alldiag ? -inst.n : inst.n) << '\n';
  for (int i = 0; i < inst.m; ++i)
    os << num17(-inst.c[i]) << (i + 1 == inst.m ? '\n' : ' ');
  emit_entries(os, 0, inst.B.scaled(-1.0));
  for (int k = 0; k < inst.m; ++k)
    emit_entries(os, k + 1, inst.A[k].scaled(-1.0));
  return os.str();
}

std::string write_sdpa(const ConicProgram& prog) {
  prog.validate();
  const int npsd = static_cast<int>(prog.psd_orders.size());
  const int f = prog.free_vars;

  std::ostringstream os;
  os << "\" equality-form conic program, exported on the file's dual side:\n"
     << "\" max <F_0,Y> s.t. <F_j,Y> = c~_j is the program min <c,z> s.t.\n"
     << "\" A z = b with F_j = row j, c~ = b, F_0 = -objective, so the\n"
     << "\" file's optimum is the negative of the program's. Free scalars\n"
     << "\" are split w = w+ - w- inside the final diagonal block.\n";
  os << prog.rows() << '\n';
  os << npsd + (prog.nonneg > 0 ? 1 : 0) + (f > 0 ? 1 : 0) << '\n';
  for (int b = 0; b < npsd; ++b) os << prog.psd_orders[b] << ' ';
  if (prog.nonneg > 0) os << -prog.nonneg << ' ';
  if (f > 0) os << -(2 * f);
  os << '\n';
  for (int i = 0; i < prog.rows(); ++i)
    os << num17(prog.b[i]) << (i + 1 == prog.rows() ? '\n' : ' ');

  // Row -1 encodes F_0 = -objective; rows 0.. encode F_1..F_rows.
  auto coeff = [&](int row, int col) {
    return row < 0 ? -prog.c[col] : prog.A(row, col);
  };
  for (int row = -1; row < prog.rows(); ++row) {
    const int matno = row + 1;
    for (int b = 0; b < npsd; ++b) {
      const int o = prog.psd_orders[b];
      Vec slice(ConicProgram::svec_dim(o));
      for (int t = 0; t < static_cast<int>(slice.size()); ++t)
        slice[t] = coeff(row, prog.psd_offset(b) + t);
      const SymMat g = smat(slice, o);
      for (int i = 0; i < o; ++i)
        for (int j = i; j < o; ++j)
          if (g(i, j) != 0.0)
            os << matno << ' ' << b + 1 << ' ' << i + 1 << ' ' << j + 1
               << ' ' << num17(g(i, j)) << '\n';
    }
    for (int t = 0; t < prog.nonneg; ++t) {
      const double v = coeff(row, prog.nonneg_offset() + t);
      if (v != 0.0)
        os << matno << ' ' << npsd + 1 << ' ' << t + 1 << ' ' << t + 1
           << ' ' << num17(v) << '\n';
    }
    const int fblk = npsd + (prog.nonneg > 0 ? 1 : 0) + 1;
    for (int t = 0; t < f; ++t) {
      const double v = coeff(row, prog.free_offset() + t);
      if (v != 0.0)
        os << matno << ' ' << fblk << ' ' << t + 1 << ' ' << t + 1 << ' '
           << num17(v) << '\n'
           << matno << ' ' << fblk << ' ' << f + t + 1 << ' ' << f + t + 1
           << ' ' << num17(-v) << '\n';
    }
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace ramana
