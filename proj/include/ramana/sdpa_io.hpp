#ifndef RAMANA_SDPA_IO_HPP
#define RAMANA_SDPA_IO_HPP

#include <iosfwd>
#include <string>

#include "ramana/conic.hpp"
#include "ramana/sdp.hpp"

namespace ramana {

// SDPA sparse format (.dat-s):
//   comment lines starting with '"' or '*' (tolerated anywhere)
//   m
//   number of blocks
//   block sizes (negative size -k = diagonal block of order k)
//   c_1 .. c_m
//   entries "matno block i j value", matno 0 = F_0, indices 1-based, i <= j.
// A file encodes  min c~^T x  s.t.  sum_i x_i F_i - F_0 psd.  It maps onto
// the library's  sup c^T x  s.t.  sum_i x_i A_i <= B  via
//   B = -F_0,  A_i = -F_i,  c = -c~,
// so the instance value is the negative of the file's optimum. Multi-block
// files concatenate block-diagonally into a single instance. Duplicate
// entries overwrite earlier ones. Throws ParseError with the line number.
SdpInstance parse_sdpa(std::istream& in);
SdpInstance parse_sdpa(const std::string& text);
SdpInstance parse_sdpa_file(const std::string& path);

// Inverse of parse_sdpa: one block (emitted with the negative-size diagonal
// convention when every matrix is diagonal), values at 17 significant
// digits. Negation is exact, so parse_sdpa(write_sdpa(inst)) reproduces the
// instance bit-exactly. The orientation note travels as header comments.
std::string write_sdpa(const SdpInstance& inst);

// Equality-form program exported on the file's dual side: the file's dual
//   max <F_0, Y>  s.t.  <F_j, Y> = c~_j,  Y psd
// is this program with F_j = the row-j coefficients, c~ = b, F_0 = minus the
// objective, so the file's optimum is -<c, z*>. Nonnegative scalars become
// one diagonal block; free scalars split as w+ - w- inside a trailing
// diagonal block of twice their count (the split exists only in the file).
std::string write_sdpa(const ConicProgram& prog);

// Whole-file helpers shared by the command-line tools.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ramana

#endif
