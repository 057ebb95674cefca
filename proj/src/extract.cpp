#include "rvm/extract.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rvm {

namespace {

struct RelocIndex {
  // sid -> mobile fids with a LEA of it / whether static code LEAs it
  std::unordered_map<uint32_t, std::set<uint32_t>> lea_mobile;
  std::unordered_map<uint32_t, bool> lea_static;
  // target sid -> source sids with a data reloc pointing at it
  std::unordered_map<uint32_t, std::set<uint32_t>> data_sources;
  // source sid -> target sids
  std::unordered_map<uint32_t, std::set<uint32_t>> data_targets;

  RelocIndex(const ProgramImage& img, const std::set<uint32_t>& mobile_fids) {
    for (const auto& r : img.relocations) {
      if (r.kind == RelocationRecord::Kind::Code) {
        if (mobile_fids.count(r.code.fid))
          lea_mobile[r.code.sid].insert(r.code.fid);
        else
          lea_static[r.code.sid] = true;
      } else {
        data_sources[r.data.target_sid].insert(r.data.sid);
        data_targets[r.data.sid].insert(r.data.target_sid);
      }
    }
  }
};

}  // namespace

std::set<uint32_t> accessible_sections(const ProgramImage& img,
                                       const std::set<uint32_t>& mobile_fids) {
  RelocIndex ix(img, mobile_fids);
  std::set<uint32_t> acc;
  std::vector<uint32_t> work;
  for (const auto& s : img.sections) {
    bool root = s.exported;
    auto it = ix.lea_static.find(s.sid);
    if (it != ix.lea_static.end() && it->second) root = true;
    if (root) {
      acc.insert(s.sid);
      work.push_back(s.sid);
    }
  }
  while (!work.empty()) {
    uint32_t sid = work.back();
    work.pop_back();
    auto it = ix.data_targets.find(sid);
    if (it == ix.data_targets.end()) continue;
    for (uint32_t t : it->second)
      if (acc.insert(t).second) work.push_back(t);
  }
  return acc;
}

std::map<uint32_t, std::vector<uint32_t>> compute_owned_sections(
    const ProgramImage& img, const std::set<uint32_t>& mobile_fids) {
  RelocIndex ix(img, mobile_fids);
  auto acc = accessible_sections(img, mobile_fids);

  std::map<uint32_t, std::vector<uint32_t>> result;
  for (uint32_t f : mobile_fids) {
    std::set<uint32_t> owned;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& s : img.sections) {
        uint32_t sid = s.sid;
        if (acc.count(sid) || owned.count(sid)) continue;
        // All LEA producers must be exactly f (or none at all).
        const auto lit = ix.lea_mobile.find(sid);
        const std::set<uint32_t>* leas = lit == ix.lea_mobile.end() ? nullptr : &lit->second;
        if (leas && (leas->size() > 1 || *leas->begin() != f)) continue;
        bool lea_by_f = leas && leas->count(f);
        // Every data-reloc source must already be owned by f.
        bool sources_ok = true;
        bool owned_source = false;
        auto dit = ix.data_sources.find(sid);
        if (dit != ix.data_sources.end()) {
          for (uint32_t src : dit->second) {
            if (owned.count(src)) {
              owned_source = true;
            } else {
              sources_ok = false;
              break;
            }
          }
        }
        if (!sources_ok) continue;
        if (!lea_by_f && !owned_source) continue;  // no producer rooted at f
        owned.insert(sid);
        changed = true;
      }
    }
    if (!owned.empty()) {
      std::vector<uint32_t> v(owned.begin(), owned.end());
      result[f] = std::move(v);
    }
  }
  return result;
}

ExtractionResult extract(const ProgramImage& img, const std::vector<Annotation>& annotations) {
  validate_image(img);
  std::set<uint32_t> mobile_fids;
  std::unordered_map<uint32_t, const Annotation*> by_fid;
  for (const auto& a : annotations) {
    if (!img.find_function(a.fid))
      throw std::invalid_argument("annotation references unknown fid " + std::to_string(a.fid));
    if (a.data_mobility && !a.make_mobile)
      throw std::invalid_argument("data_mobility requires make_mobile");
    if (a.make_mobile) {
      mobile_fids.insert(a.fid);
      by_fid[a.fid] = &a;
    }
  }

  ExtractionResult res;
  auto ownership = compute_owned_sections(img, mobile_fids);

  // Ownership is honored only for blocks whose annotation enables data
  // mobility; everything else stays static.
  std::unordered_map<uint32_t, uint32_t> owner_of;  // sid -> fid
  for (const auto& [fid, sids] : ownership) {
    const Annotation* a = by_fid.at(fid);
    if (!a->data_mobility) continue;
    for (uint32_t sid : sids) owner_of[sid] = fid;
  }
  // Exported sections can never move; report the impossible request.
  for (const auto& a : annotations) {
    if (!a.make_mobile || !a.data_mobility) continue;
    for (const auto& r : img.relocations) {
      if (r.kind != RelocationRecord::Kind::Code || r.code.fid != a.fid) continue;
      const DataSection* s = img.find_section(r.code.sid);
      if (s && s->exported && !owner_of.count(s->sid))
        res.warnings.push_back("section " + std::to_string(s->sid) +
                               " referenced by mobile fid " + std::to_string(a.fid) +
                               " stays static (exported)");
    }
  }

  res.static_image = img;
  for (auto& f : res.static_image.functions) {
    if (!mobile_fids.count(f.fid)) continue;
    MobileBlockPayload p;
    p.block_id = f.fid;  // one block per function
    p.version_id = 0;
    p.group_id = 0;
    p.entry_fid = f.fid;
    p.param_count = f.param_count;
    p.code = encode_function(f);
    auto oit = ownership.find(f.fid);
    if (oit != ownership.end() && by_fid.at(f.fid)->data_mobility) {
      for (uint32_t sid : oit->second) {
        const DataSection* s = img.find_section(sid);
        p.owned_sections.emplace_back(sid, s->bytes);
      }
      res.ownership[f.fid] = oit->second;
    }
    res.blocks.push_back(std::move(p));
    f.code.clear();  // stub marker
  }
  for (auto& s : res.static_image.sections) {
    if (owner_of.count(s.sid)) {
      s.bytes.clear();
      s.mobile_owned = true;
    }
  }
  // Code relocations of extracted functions travel with the payload (the
  // LEA instructions are in its code). Data relocations all stay: the ones
  // sourced in owned sections are patched by the loader at map time.
  std::erase_if(res.static_image.relocations, [&](const RelocationRecord& r) {
    return r.kind == RelocationRecord::Kind::Code && mobile_fids.count(r.code.fid) > 0;
  });
  // Layout accesses inside extracted functions refer to code that is gone;
  // drop them, then prune layout tables nothing references any more.
  std::erase_if(res.static_image.layout_accesses,
                [&](const LayoutAccess& a) { return mobile_fids.count(a.fid) > 0; });
  std::set<uint32_t> live_layouts;
  for (const auto& a : res.static_image.layout_accesses) live_layouts.insert(a.layout_id);
  std::erase_if(res.static_image.layouts,
                [&](const LayoutTable& l) { return !live_layouts.count(l.layout_id); });
  validate_image(res.static_image);
  return res;
}

}  // namespace rvm
