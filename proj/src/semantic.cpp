#include "rvm/semantic.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rvm/cfg.hpp"
#include "rvm/rng.hpp"

namespace rvm {

namespace {

using namespace asmops;

// MOV sequence realizing R_j := R_{perm[j]} for all j simultaneously,
// cycle by cycle through the scratch register R5.
std::vector<Instruction> permute_registers(const std::vector<uint8_t>& perm) {
  std::vector<Instruction> out;
  const size_t n = perm.size();
  std::vector<bool> done(n, false);
  for (size_t s = 0; s < n; ++s) {
    if (done[s] || perm[s] == s) {
      done[s] = true;
      continue;
    }
    // Cycle starting at s: R_s <- R_perm[s] <- R_perm[perm[s]] ...
    out.push_back(mov(5, static_cast<uint8_t>(s)));
    size_t cur = s;
    while (perm[cur] != s) {
      out.push_back(mov(static_cast<uint8_t>(cur), perm[cur]));
      done[cur] = true;
      cur = perm[cur];
    }
    out.push_back(mov(static_cast<uint8_t>(cur), 5));
    done[cur] = true;
  }
  return out;
}

std::vector<uint8_t> random_nonidentity_perm(Prng& rng, size_t n) {
  std::vector<uint8_t> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = static_cast<uint8_t>(i);
  do {
    for (size_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  } while (std::is_sorted(p.begin(), p.end()));
  return p;
}

std::vector<uint8_t> invert_perm(const std::vector<uint8_t>& p) {
  std::vector<uint8_t> inv(p.size());
  for (size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<uint8_t>(i);
  return inv;
}

// Rebuilds a function with instructions inserted at chosen points, fixing
// branch offsets and remapping layout-access indices.
void insert_at_points(ProgramImage& img, uint32_t fid,
                      const std::map<size_t, std::vector<Instruction>>& inserts) {
  FunctionDef* f = img.find_function(fid);
  Cfg cfg = Cfg::build(f->code);
  for (auto& bb : cfg.blocks) {
    std::vector<TaggedInstr> out;
    for (auto& ti : bb.insns) {
      auto it = ti.src >= 0 ? inserts.find(static_cast<size_t>(ti.src)) : inserts.end();
      if (it != inserts.end())
        for (const auto& in : it->second) out.push_back({in, -1});
      out.push_back(ti);
    }
    bb.insns = std::move(out);
  }
  auto lin = cfg.linearize_identity(f->code.size());
  f->code = lin.code;
  for (auto& a : img.layout_accesses) {
    if (a.fid != fid) continue;
    int ni = lin.index_map[a.instr_index];
    if (ni < 0) throw std::logic_error("layout access lost in rewrite");
    a.instr_index = static_cast<uint32_t>(ni);
  }
}

// Applies a parameter reordering of function `target` with permutation
// `sigma` (caller argument j lands in register sigma[j]).
void apply_param_reorder(ProgramImage& img, uint32_t target, const std::vector<uint8_t>& sigma) {
  // Callee prologue: R_j := R_{sigma[j]}.
  {
    std::map<size_t, std::vector<Instruction>> ins;
    ins[0] = permute_registers(sigma);
    insert_at_points(img, target, ins);
  }
  // Call sites: R_{sigma[j]} := R_j just before the CALL.
  auto inv = invert_perm(sigma);
  auto moves = permute_registers(inv);
  for (auto& f : img.functions) {
    if (f.fid == target) {
      // Recursive calls also marshal through the permuted interface.
    }
    std::map<size_t, std::vector<Instruction>> ins;
    for (size_t i = 0; i < f.code.size(); ++i)
      if (f.code[i].op == Op::Call && f.code[i].imm == target) ins[i] = moves;
    if (!ins.empty()) insert_at_points(img, f.fid, ins);
  }
  regenerate_code_relocs(img);
}

void apply_field_reorder(ProgramImage& img, uint32_t layout_id, const std::vector<uint8_t>& pi) {
  LayoutTable* lt = nullptr;
  for (auto& l : img.layouts)
    if (l.layout_id == layout_id) lt = &l;
  if (!lt) throw std::invalid_argument("unknown layout");
  std::vector<uint32_t> old = lt->field_offsets;
  for (size_t i = 0; i < old.size(); ++i) lt->field_offsets[i] = old[pi[i]];
  for (const auto& a : img.layout_accesses) {
    if (a.layout_id != layout_id) continue;
    FunctionDef* f = img.find_function(a.fid);
    f->code[a.instr_index].imm = lt->field_offsets[a.field_index];
  }
}

}  // namespace

VariantSet generate_semantic_variants(const ProgramImage& img, SemanticTransform transform,
                                      size_t n, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need at least two variants");
  validate_image(img);

  std::vector<uint32_t> eligible;
  if (transform == SemanticTransform::ParamReorder) {
    for (const auto& f : img.functions)
      if (f.param_count >= 2 && !f.code.empty()) eligible.push_back(f.fid);
    for (const auto& f : img.functions)
      for (const auto& in : f.code)
        if (in.op == Op::CallR)
          throw std::invalid_argument("indirect calls prevent parameter reordering");
  } else {
    for (const auto& l : img.layouts)
      if (l.field_offsets.size() >= 2) eligible.push_back(l.layout_id);
  }
  if (eligible.empty()) throw std::invalid_argument("no eligible reorder target");

  Prng rng(seed);
  VariantSet vs;
  vs.transform = transform;
  std::set<std::vector<uint8_t>> taken;  // (target, perm) pairs, encoded
  for (size_t i = 0; i < n; ++i) {
    uint64_t vseed = rng.next() | 1;
    Prng vrng(vseed);
    ProgramImage v = img;
    for (int attempt = 0;; ++attempt) {
      uint32_t target = eligible[vrng.below(eligible.size())];
      size_t width = 0;
      if (transform == SemanticTransform::ParamReorder)
        width = img.find_function(target)->param_count;
      else
        for (const auto& l : img.layouts)
          if (l.layout_id == target) width = l.field_offsets.size();
      auto perm = random_nonidentity_perm(vrng, width);
      std::vector<uint8_t> key = perm;
      key.push_back(static_cast<uint8_t>(target));
      key.push_back(static_cast<uint8_t>(target >> 8));
      if (!taken.insert(key).second && attempt < 64) continue;  // fresh variant
      if (transform == SemanticTransform::ParamReorder)
        apply_param_reorder(v, target, perm);
      else
        apply_field_reorder(v, target, perm);
      break;
    }
    validate_image(v);
    vs.variants.push_back(std::move(v));
    vs.seeds.push_back(vseed);
  }
  return vs;
}

std::set<uint32_t> diff_variants(VariantSet& vs) {
  if (vs.variants.size() < 2) throw std::invalid_argument("need at least two variants");
  const ProgramImage& first = vs.variants.front();
  for (const auto& v : vs.variants) {
    if (v.functions.size() != first.functions.size() ||
        v.sections.size() != first.sections.size())
      throw std::invalid_argument("variant id spaces differ");
    for (size_t i = 0; i < v.functions.size(); ++i)
      if (v.functions[i].fid != first.functions[i].fid)
        throw std::invalid_argument("variant id spaces differ");
  }
  std::set<uint32_t> out;
  for (size_t i = 0; i < first.functions.size(); ++i) {
    auto base = encode_function(first.functions[i]);
    for (size_t k = 1; k < vs.variants.size(); ++k) {
      if (encode_function(vs.variants[k].functions[i]) != base) {
        out.insert(first.functions[i].fid);
        break;
      }
    }
  }
  vs.differing_fids = out;
  return out;
}

}  // namespace rvm
