// Random image generator for the accessibility/ownership analysis tests and
// the naive brute-force oracle the analysis is checked against.
#pragma once

#include <map>
#include <set>
#include <vector>

#include "rvm/builder.hpp"
#include "rvm/extract.hpp"
#include "rvm/rng.hpp"

namespace rvmtest {

using namespace rvm;

struct AnalysisImage {
  ProgramImage img;
  std::set<uint32_t> mobile_fids;
};

// Random relocation graph: functions hold random LEA sites, sections get
// random exported flags and data relocations. Bodies are trivial (the image
// is analyzed, not executed).
inline AnalysisImage random_analysis_image(Prng& rng, uint32_t max_funcs = 50,
                                           uint32_t max_sections = 40) {
  uint32_t nf = 2 + static_cast<uint32_t>(rng.below(max_funcs - 1));
  uint32_t ns = 1 + static_cast<uint32_t>(rng.below(max_sections));
  ImageBuilder b;
  std::vector<uint32_t> sids;
  for (uint32_t i = 0; i < ns; ++i) {
    uint32_t sid = 100 + i;
    sids.push_back(sid);
    b.section(sid, "s" + std::to_string(i), std::vector<uint8_t>(8 + 4 * rng.below(8)),
              /*exported=*/rng.chance(0.15), /*writable=*/rng.chance(0.3));
  }
  for (uint32_t f = 1; f <= nf; ++f) {
    auto& fb = b.function(f, "f" + std::to_string(f), 0);
    size_t nlea = rng.below(4);
    for (size_t i = 0; i < nlea; ++i)
      fb.lea(1, sids[rng.below(sids.size())]);
    fb.emit(asmops::ret());
  }
  // Random data relocations (offsets 4-aligned and in bounds by size choice).
  size_t nrel = rng.below(ns * 2);
  for (size_t i = 0; i < nrel; ++i) {
    uint32_t src = sids[rng.below(sids.size())];
    uint32_t dst = sids[rng.below(sids.size())];
    b.data_reloc(src, 4 * static_cast<uint32_t>(rng.below(2)), dst);
  }
  b.entry(1);
  AnalysisImage ai;
  ai.img = b.build();
  for (uint32_t f = 2; f <= nf; ++f)
    if (rng.chance(0.45)) ai.mobile_fids.insert(f);
  return ai;
}

// Brute-force accessibility: repeatedly rescan every section and rule until
// nothing changes, reading the raw relocation list each time.
inline std::set<uint32_t> oracle_accessible(const ProgramImage& img,
                                            const std::set<uint32_t>& mobile) {
  std::set<uint32_t> acc;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& s : img.sections) {
      if (acc.count(s.sid)) continue;
      bool in = s.exported;
      for (const auto& r : img.relocations) {
        if (r.kind == RelocationRecord::Kind::Code && r.code.sid == s.sid &&
            !mobile.count(r.code.fid))
          in = true;
        if (r.kind == RelocationRecord::Kind::Data && r.data.target_sid == s.sid &&
            acc.count(r.data.sid))
          in = true;
      }
      if (in) {
        acc.insert(s.sid);
        changed = true;
      }
    }
  }
  return acc;
}

// Brute-force ownership, evaluating the ownership rule from scratch on
// every pass: candidate sections may be claimed by mobile function f when
// every LEA producer is f and every data-reloc source is already owned by
// f, with at least one producer rooted at f.
inline std::map<uint32_t, std::vector<uint32_t>> oracle_owned(
    const ProgramImage& img, const std::set<uint32_t>& mobile) {
  auto acc = oracle_accessible(img, mobile);
  std::map<uint32_t, std::vector<uint32_t>> out;
  for (uint32_t f : mobile) {
    std::set<uint32_t> owned;
    for (size_t pass = 0; pass <= img.sections.size(); ++pass) {
      for (const auto& s : img.sections) {
        if (acc.count(s.sid) || owned.count(s.sid)) continue;
        bool lea_f = false, lea_other = false;
        for (const auto& r : img.relocations)
          if (r.kind == RelocationRecord::Kind::Code && r.code.sid == s.sid &&
              mobile.count(r.code.fid)) {
            if (r.code.fid == f)
              lea_f = true;
            else
              lea_other = true;
          }
        if (lea_other) continue;
        bool all_sources_owned = true, any_source_owned = false;
        for (const auto& r : img.relocations)
          if (r.kind == RelocationRecord::Kind::Data && r.data.target_sid == s.sid) {
            if (owned.count(r.data.sid))
              any_source_owned = true;
            else
              all_sources_owned = false;
          }
        if (!all_sources_owned) continue;
        if (!lea_f && !any_source_owned) continue;
        owned.insert(s.sid);
      }
    }
    if (!owned.empty()) out[f] = std::vector<uint32_t>(owned.begin(), owned.end());
  }
  return out;
}

}  // namespace rvmtest
