#include "perceptfe/text.hpp"

#include <array>
#include <cctype>
#include <cstdint>

namespace pfe {

namespace {

inline bool ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Maps a Unicode code point in the Latin-1 supplement / Latin Extended-A
// ranges to its undecorated ASCII base letter, or 0 when there is none.
char strip_diacritic(uint32_t cp) {
  struct Range {
    uint32_t lo, hi;
    char base;
  };
  static constexpr Range kRanges[] = {
      {0xC0, 0xC6, 'a'},   {0xC7, 0xC7, 'c'},   {0xC8, 0xCB, 'e'},
      {0xCC, 0xCF, 'i'},   {0xD0, 0xD0, 'd'},   {0xD1, 0xD1, 'n'},
      {0xD2, 0xD6, 'o'},   {0xD8, 0xD8, 'o'},   {0xD9, 0xDC, 'u'},
      {0xDD, 0xDD, 'y'},   {0xDF, 0xDF, 's'},   {0xE0, 0xE6, 'a'},
      {0xE7, 0xE7, 'c'},   {0xE8, 0xEB, 'e'},   {0xEC, 0xEF, 'i'},
      {0xF0, 0xF0, 'd'},   {0xF1, 0xF1, 'n'},   {0xF2, 0xF6, 'o'},
      {0xF8, 0xF8, 'o'},   {0xF9, 0xFC, 'u'},   {0xFD, 0xFD, 'y'},
      {0xFF, 0xFF, 'y'},   {0x100, 0x105, 'a'}, {0x106, 0x10D, 'c'},
      {0x10E, 0x111, 'd'}, {0x112, 0x11B, 'e'}, {0x11C, 0x123, 'g'},
      {0x124, 0x127, 'h'}, {0x128, 0x131, 'i'}, {0x132, 0x135, 'j'},
      {0x136, 0x138, 'k'}, {0x139, 0x142, 'l'}, {0x143, 0x14B, 'n'},
      {0x14C, 0x153, 'o'}, {0x154, 0x159, 'r'}, {0x15A, 0x161, 's'},
      {0x162, 0x167, 't'}, {0x168, 0x173, 'u'}, {0x174, 0x175, 'w'},
      {0x176, 0x178, 'y'}, {0x179, 0x17E, 'z'}, {0x17F, 0x17F, 's'},
  };
  for (const auto& r : kRanges)
    if (cp >= r.lo && cp <= r.hi) return r.base;
  return 0;
}

}  // namespace

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && ascii_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_blank(std::string_view s) {
  for (char c : s)
    if (!ascii_space(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string normalize_key(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  bool pending_space = false;
  bool emitted = false;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    uint32_t cp = 0;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      cp = (uint32_t(c & 0x1F) << 6) | (uint32_t(s[i + 1]) & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      cp = (uint32_t(c & 0x0F) << 12) | ((uint32_t(s[i + 1]) & 0x3F) << 6) |
           (uint32_t(s[i + 2]) & 0x3F);
      len = 3;
    } else {
      // Invalid or 4-byte sequence: keep the raw byte, lowercased if ASCII.
      cp = c;
    }
    i += len;

    if (cp < 0x80 && ascii_space(static_cast<unsigned char>(cp))) {
      pending_space = emitted;
      continue;
    }
    char base = cp >= 0x80 ? strip_diacritic(cp) : 0;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (base != 0) {
      out.push_back(base);
    } else if (cp < 0x80) {
      out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    } else {
      // Unmapped non-ASCII: re-emit the original bytes untouched.
      for (size_t k = i - len; k < i; ++k) out.push_back(s[k]);
    }
    emitted = true;
  }
  return out;
}

}  // namespace pfe
