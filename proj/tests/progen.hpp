// Random runnable program generator: acyclic call graphs, bounded loops,
// section traffic and emitted output, with mobility annotations. Programs
// terminate by construction and never leak addresses into their output, so
// protected and unprotected runs can be compared byte for byte.
#pragma once

#include <string>
#include <vector>

#include "rvm/builder.hpp"
#include "rvm/extract.hpp"
#include "rvm/rng.hpp"

namespace rvmtest {

using namespace rvm;
using namespace rvm::asmops;

struct GeneratedProgram {
  ProgramImage img;
  std::vector<Annotation> annotations;
};

inline GeneratedProgram random_program(Prng& rng, uint32_t max_funcs = 30) {
  const uint32_t nf = 2 + static_cast<uint32_t>(rng.below(max_funcs - 1));
  const uint32_t ns = 1 + static_cast<uint32_t>(rng.below(6));

  struct SecInfo {
    uint32_t sid;
    uint32_t size;
    bool writable;
    bool stored_to = false;
  };
  std::vector<SecInfo> secs;
  ImageBuilder b;
  for (uint32_t i = 0; i < ns; ++i) {
    uint32_t sid = 200 + i;
    uint32_t size = 16 + 4 * static_cast<uint32_t>(rng.below(16));
    bool writable = rng.chance(0.4);
    std::vector<uint8_t> bytes(size);
    for (auto& x : bytes) x = static_cast<uint8_t>(rng.next());
    b.section(sid, "g" + std::to_string(i), std::move(bytes), rng.chance(0.1), writable);
    secs.push_back({sid, size, writable});
  }
  // A few data relocations between sections (word 0 of the source is
  // reserved for them; distinct sources keep the patched words unambiguous).
  std::vector<std::pair<uint32_t, uint32_t>> chases;  // (src sid, target sid)
  for (uint32_t i = 0; i < ns && i < 3; ++i) {
    if (!rng.chance(0.5)) continue;
    uint32_t src = secs[i].sid;
    uint32_t dst = secs[rng.below(secs.size())].sid;
    b.data_reloc(src, 0, dst);
    chases.emplace_back(src, dst);
  }

  // Private sections referenced from exactly one function each: the shape
  // data mobility exists for. Kept out of the shared pool above.
  std::vector<std::pair<uint32_t, uint32_t>> privs;  // (sid, owner fid)
  if (nf > 2) {
    uint32_t npriv = 1 + static_cast<uint32_t>(rng.below(2));
    for (uint32_t i = 0; i < npriv; ++i) {
      uint32_t sid = 300 + i;
      uint32_t size = 16 + 4 * static_cast<uint32_t>(rng.below(8));
      std::vector<uint8_t> bytes(size);
      for (auto& x : bytes) x = static_cast<uint8_t>(rng.next());
      b.section(sid, "p" + std::to_string(i), std::move(bytes));
      privs.emplace_back(sid, 2 + static_cast<uint32_t>(rng.below(nf - 1)));
    }
  }

  std::vector<uint8_t> param_of(nf + 1, 0);
  for (uint32_t f = 2; f <= nf; ++f) param_of[f] = static_cast<uint8_t>(rng.below(5));

  for (uint32_t f = 1; f <= nf; ++f) {
    const bool is_entry = f == 1;
    auto& fb = b.function(f, "fn" + std::to_string(f), is_entry ? 0 : param_of[f]);
    // Initialize scratch registers not covered by parameters.
    for (uint8_t r = is_entry ? 0 : param_of[f]; r < 5; ++r)
      fb.emit(loadi(r, static_cast<uint32_t>(rng.next())));
    if (is_entry) {
      // Mix a couple of input bytes into the state.
      for (int i = 0; i < 3; ++i) {
        fb.emit(sys(kSysRead));
        fb.emit(xor_(static_cast<uint8_t>(1 + rng.below(3)), 0,
                     static_cast<uint8_t>(rng.below(4))));
      }
    }

    for (const auto& [psid, owner] : privs)
      if (owner == f) {
        fb.lea(4, psid);
        fb.emit(loadb(static_cast<uint8_t>(rng.below(4)), 4,
                      static_cast<uint32_t>(rng.below(16))));
      }

    int loops_left = 1;
    size_t slots = 3 + rng.below(10);
    for (size_t s = 0; s < slots; ++s) {
      double dice = (rng.next() >> 11) * 0x1.0p-53;
      // R4 holds addresses, R5 loop counters; they never feed the output.
      uint8_t rd = static_cast<uint8_t>(rng.below(4));
      uint8_t ra = static_cast<uint8_t>(rng.below(4));
      uint8_t rb = static_cast<uint8_t>(rng.below(4));
      if (dice < 0.30) {
        static const Op arith[] = {Op::Add, Op::Sub, Op::Mul, Op::And, Op::Or, Op::Xor};
        fb.emit({arith[rng.below(6)], rd, ra, rb, 0});
      } else if (dice < 0.45) {
        static const Op arithi[] = {Op::AddI, Op::SubI, Op::XorI, Op::AndI, Op::ShlI, Op::ShrI};
        Op op = arithi[rng.below(6)];
        uint32_t imm = (op == Op::ShlI || op == Op::ShrI) ? static_cast<uint32_t>(rng.below(31))
                                                          : static_cast<uint32_t>(rng.next());
        fb.emit({op, rd, ra, 0, imm});
      } else if (dice < 0.60) {
        // Section read: byte or aligned word.
        const auto& sec = secs[rng.below(secs.size())];
        fb.lea(4, sec.sid);
        if (rng.chance(0.5))
          fb.emit(loadb(rd, 4, 4 + static_cast<uint32_t>(rng.below(sec.size - 4))));
        else
          fb.emit(load(rd, 4, 4 * (1 + static_cast<uint32_t>(rng.below(sec.size / 4 - 1)))));
      } else if (dice < 0.70) {
        // Section write (writable sections only; word 0 holds relocations).
        std::vector<size_t> w;
        for (size_t i = 0; i < secs.size(); ++i)
          if (secs[i].writable) w.push_back(i);
        if (w.empty()) continue;
        auto& sec = secs[w[rng.below(w.size())]];
        sec.stored_to = true;
        fb.lea(4, sec.sid);
        fb.emit(storeb(ra, 4, 4 + static_cast<uint32_t>(rng.below(sec.size - 4))));
      } else if (dice < 0.78 && !chases.empty()) {
        // Pointer chase through a data relocation; consume one data byte.
        auto [src, dst] = chases[rng.below(chases.size())];
        uint32_t dstsize = 0;
        for (const auto& sec : secs)
          if (sec.sid == dst) dstsize = sec.size;
        fb.lea(4, src);
        fb.emit(load(4, 4, 0));
        fb.emit(loadb(rd, 4, 4 + static_cast<uint32_t>(rng.below(dstsize - 4))));
      } else if (dice < 0.88 && f < nf) {
        // Call a later function (acyclic graph).
        uint32_t callee = f + 1 + static_cast<uint32_t>(rng.below(nf - f));
        for (uint8_t a = 0; a < param_of[callee]; ++a)
          if (rng.chance(0.5)) fb.emit(loadi(a, static_cast<uint32_t>(rng.next())));
        fb.emit(call(callee));
      } else if (dice < 0.94 && loops_left > 0) {
        // Bounded countdown loop around a couple of cheap ops (R5 counter).
        --loops_left;
        std::string lab = "L" + std::to_string(s);
        fb.emit(loadi(5, 2 + static_cast<uint32_t>(rng.below(5))));
        fb.label(lab);
        fb.emit(add(rd, ra, rb));
        fb.emit(xori(ra, rd, static_cast<uint32_t>(rng.next())));
        fb.emit(subi(5, 5, 1));
        fb.jnz(5, lab);
      } else {
        fb.emit(mov(0, ra));
        fb.emit(sys(kSysEmit));
      }
    }
    fb.emit(mov(0, static_cast<uint8_t>(rng.below(4))));
    if (is_entry) {
      fb.emit(sys(kSysEmit));
      fb.emit(andi(0, 0, 0x7F));
      fb.emit(sys(kSysExit));
    } else {
      fb.emit(ret());
    }
  }

  // Writable sections that receive stores must stay static so that flushes
  // cannot reset them: anchor them with a LEA in the entry function by
  // rebuilding if needed is expensive, so instead anchor every stored-to
  // section up front via a dedicated anchor function that is never mobile.
  GeneratedProgram gp;
  uint32_t anchor_fid = nf + 1;
  {
    auto& anchor = b.function(anchor_fid, "anchors", 0);
    bool any = false;
    for (const auto& sec : secs)
      if (sec.stored_to) {
        anchor.lea(1, sec.sid);
        any = true;
      }
    if (!any) anchor.emit(loadi(1, 0));
    anchor.emit(ret());
  }
  b.entry(1);
  gp.img = b.build();

  for (uint32_t f = 2; f <= nf; ++f) {
    bool owns_priv = false;
    for (const auto& [psid, owner] : privs) owns_priv |= owner == f;
    double p = owns_priv ? 0.75 : 0.45;
    if (!rng.chance(p)) continue;
    Annotation a;
    a.fid = f;
    a.make_mobile = true;
    a.data_mobility = owns_priv || rng.chance(0.7);
    gp.annotations.push_back(a);
  }
  return gp;
}

inline std::vector<uint8_t> random_input(Prng& rng, size_t max_len = 16) {
  std::vector<uint8_t> in(rng.below(max_len + 1));
  for (auto& b : in) b = static_cast<uint8_t>(rng.next());
  return in;
}

}  // namespace rvmtest
