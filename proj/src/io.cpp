#include "trackscore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "trackscore/error.hpp"

namespace trackscore {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// Calls fn(line_number, line) for every non-blank line.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    if (!line.empty()) fn(line_no, line);
    start = end + 1;
  }
}

class LineReader {
public:
  LineReader(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  double real(std::string_view field, const char* what) const {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
      fail(std::string(what) + " '" + std::string(field) + "' is not a number");
    return v;
  }

  int integer(std::string_view field, const char* what) const {
    const double v = real(field, what);
    if (v != std::floor(v) || std::abs(v) > 2e9) fail(std::string(what) + " '" + std::string(field) + "' is not an integer");
    return static_cast<int>(v);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

private:
  const std::string& source_;
  std::size_t line_;
};

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Detection> parse_mot(std::string_view text, Side side, const std::string& source) {
  std::vector<Detection> out;
  std::set<std::pair<int, int>> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineReader r(source, line_no);
    const auto f = split(line, ',');
    if (f.size() < 6) r.fail("expected at least 6 comma-separated fields, got " + std::to_string(f.size()));
    Detection d;
    d.frame = r.integer(f[0], "frame");
    d.id = r.integer(f[1], "id");
    if (d.frame < 1) r.fail("frame must be >= 1");
    if (d.id < 1) r.fail("id must be >= 1");
    Box2D box{r.real(f[2], "bb_left"), r.real(f[3], "bb_top"), r.real(f[4], "bb_width"), r.real(f[5], "bb_height")};
    try {
      validate(box);
    } catch (const InvalidGeometry& e) {
      r.fail(e.what());
    }
    d.geometry = box;
    bool keep = true;
    if (side == Side::gt) {
      if (f.size() > 6) keep = r.real(f[6], "consider flag") != 0.0;
      if (f.size() > 7) d.class_id = r.integer(f[7], "class");
      if (f.size() > 8) d.visibility = r.real(f[8], "visibility");
    } else if (f.size() > 6) {
      const double conf = r.real(f[6], "confidence");
      if (conf != -1.0) d.confidence = conf;
    }
    if (!seen.emplace(d.frame, d.id).second)
      throw FormatError(source + ":" + std::to_string(line_no) + ": id " + std::to_string(d.id) +
                        " appears twice in frame " + std::to_string(d.frame));
    if (keep) out.push_back(d);
  });
  return out;
}

std::vector<Detection> parse_mot_file(const std::filesystem::path& path, Side side) {
  return parse_mot(read_text_file(path), side, path.string());
}

std::string write_mot(const std::vector<Detection>& dets, Side side) {
  std::vector<const Detection*> order;
  for (const auto& d : dets) order.push_back(&d);
  std::stable_sort(order.begin(), order.end(), [](const Detection* a, const Detection* b) {
    return a->frame != b->frame ? a->frame < b->frame : a->id < b->id;
  });
  std::string out;
  for (const auto* d : order) {
    const auto* box = std::get_if<Box2D>(&d->geometry);
    if (!box) throw ContractViolation("MOTChallenge files hold boxes only");
    out += std::to_string(d->frame) + "," + std::to_string(d->id) + "," + format_real(box->left) + "," +
           format_real(box->top) + "," + format_real(box->width) + "," + format_real(box->height) + ",";
    if (side == Side::gt) {
      out += (d->consider ? "1," : "0,") + std::to_string(d->class_id) + "," + format_real(d->visibility);
    } else {
      out += (d->confidence ? format_real(*d->confidence) : std::string("-1")) + ",-1,-1";
    }
    out += "\n";
  }
  return out;
}

ClassProbs parse_class_probs(std::string_view text, const std::string& source) {
  ClassProbs probs;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineReader r(source, line_no);
    const auto f = split(line, ',');
    if (f.size() != 3) r.fail("expected frame,id,class:prob[;class:prob]...");
    const int frame = r.integer(f[0], "frame"), id = r.integer(f[1], "id");
    auto [it, fresh] = probs.probs.try_emplace({frame, id});
    if (!fresh) r.fail("detection " + std::to_string(id) + " in frame " + std::to_string(frame) + " listed twice");
    double sum = 0.0;
    for (auto entry : split(f[2], ';')) {
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) r.fail("class entry '" + std::string(entry) + "' lacks ':'");
      const int cls = r.integer(trim(entry.substr(0, colon)), "class");
      const double p = r.real(trim(entry.substr(colon + 1)), "probability");
      if (p < 0.0 || p > 1.0) r.fail("probability outside [0, 1]");
      if (!it->second.emplace(cls, p).second) r.fail("class " + std::to_string(cls) + " listed twice");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw FormatError(source + ":" + std::to_string(line_no) + ": probabilities sum to " + format_real(sum));
  });
  return probs;
}

ClassProbs parse_class_probs_file(const std::filesystem::path& path) {
  return parse_class_probs(read_text_file(path), path.string());
}

FederationMask parse_federation_mask(std::string_view text, const std::string& source) {
  FederationMask mask;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineReader r(source, line_no);
    const auto f = split(line, ',');
    if (f.size() != 2) r.fail("expected frame,class[;class]...");
    auto& classes = mask.classes[r.integer(f[0], "frame")];
    if (f[1].empty()) return;
    for (auto c : split(f[1], ';')) classes.insert(r.integer(c, "class"));
  });
  return mask;
}

FederationMask parse_federation_mask_file(const std::filesystem::path& path) {
  return parse_federation_mask(read_text_file(path), path.string());
}

std::vector<SeqMapEntry> parse_seqmap(std::string_view text, const std::filesystem::path& gt_dir,
                                      const std::filesystem::path& results_dir, const std::string& source) {
  std::vector<SeqMapEntry> out;
  std::set<std::string> names;
  bool first = true;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineReader r(source, line_no);
    const auto f = split(line, ',');
    const bool header = first && f[0] == "name";
    first = false;
    if (header) return;
    if (f.size() > 2 || f[0].empty()) r.fail("expected name or name,num_frames");
    SeqMapEntry e;
    e.name = std::string(f[0]);
    if (f.size() == 2) {
      e.num_frames = r.integer(f[1], "num_frames");
      if (e.num_frames < 1) r.fail("num_frames must be >= 1");
    }
    if (!names.insert(e.name).second) r.fail("sequence " + e.name + " listed twice");
    const auto nested = gt_dir / e.name / "gt" / "gt.txt";
    e.gt_path = std::filesystem::exists(nested) ? nested : gt_dir / (e.name + ".txt");
    e.result_path = results_dir / (e.name + ".txt");
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<SeqMapEntry> parse_seqmap_file(const std::filesystem::path& path, const std::filesystem::path& gt_dir,
                                           const std::filesystem::path& results_dir) {
  return parse_seqmap(read_text_file(path), gt_dir, results_dir, path.string());
}

SequencePair load_sequence(const SeqMapEntry& entry) {
  SequencePair seq;
  seq.name = entry.name;
  seq.gt = parse_mot_file(entry.gt_path, Side::gt);
  seq.pr = parse_mot_file(entry.result_path, Side::pred);
  seq.num_frames = entry.num_frames;
  if (seq.num_frames == 0) {
    for (const auto& d : seq.gt) seq.num_frames = std::max(seq.num_frames, d.frame);
    for (const auto& d : seq.pr) seq.num_frames = std::max(seq.num_frames, d.frame);
  }
  try {
    validate(seq);
  } catch (const FormatError& e) {
    throw FormatError(entry.name + ": " + e.what());
  }
  return seq;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace trackscore
