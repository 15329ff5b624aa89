#include <charconv>
#include <fstream>
#include <sstream>

#include "approxmul/error.hpp"
#include "approxmul/metrics.hpp"
#include "json.hpp"

#ifndef APPROXMUL_VERSION
#define APPROXMUL_VERSION "0.0.0"
#endif

namespace approxmul {
namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("report: bad number `" + s + "`");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("report: bad integer `" + s + "`");
  return v;
}

ojson provenance_json(const Provenance& p) {
  ojson j;
  j["tool_version"] = p.tool_version;
  j["index_map"] = p.index_map;
  j["metric_definitions"] = p.metric_definitions;
  j["notes"] = p.notes;
  return j;
}

Provenance provenance_from(const ojson& j) {
  Provenance p;
  p.tool_version = j.at("tool_version").get<std::string>();
  p.index_map = j.at("index_map").get<std::string>();
  p.metric_definitions = j.at("metric_definitions").get<std::vector<std::string>>();
  p.notes = j.at("notes").get<std::vector<std::string>>();
  return p;
}

ojson report_json(const ErrorReport& r) {
  ojson j;
  j["model"] = r.model;
  j["width"] = r.width;
  j["pair_count"] = r.pair_count;
  j["mismatch_count"] = r.mismatch_count;
  j["ed_sum"] = r.ed_sum;
  j["max_ed"] = r.max_ed;
  j["er"] = r.er;
  j["med"] = r.med;
  j["nmed"] = r.nmed;
  j["mred"] = r.mred;
  j["mred_approx_denominator"] = r.mred_approx_denominator;
  ojson hist = ojson::object();
  for (const auto& [ed, c] : r.ed_histogram) hist[std::to_string(ed)] = c;
  j["ed_histogram"] = std::move(hist);
  return j;
}

ErrorReport report_from(const ojson& j) {
  ErrorReport r;
  r.model = j.at("model").get<std::string>();
  r.width = j.at("width").get<unsigned>();
  r.pair_count = j.at("pair_count").get<std::uint64_t>();
  r.mismatch_count = j.at("mismatch_count").get<std::uint64_t>();
  r.ed_sum = j.at("ed_sum").get<std::uint64_t>();
  r.max_ed = j.at("max_ed").get<std::uint64_t>();
  r.er = j.at("er").get<double>();
  r.med = j.at("med").get<double>();
  r.nmed = j.at("nmed").get<double>();
  r.mred = j.at("mred").get<double>();
  r.mred_approx_denominator = j.at("mred_approx_denominator").get<double>();
  for (const auto& [k, v] : j.at("ed_histogram").items()) r.ed_histogram[parse_u64(k)] = v.get<std::uint64_t>();
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw FormatError("report: unterminated quote in CSV");
  fields.push_back(std::move(cur));
  return fields;
}

constexpr const char* kCsvHeader =
    "model,width,pair_count,mismatch_count,ed_sum,max_ed,er,med,nmed,mred,mred_approx_denominator,"
    "ed_histogram";

}  // namespace

Provenance default_provenance() {
  Provenance p;
  p.tool_version = APPROXMUL_VERSION;
  p.index_map = describe_index_map(default_index_map());
  p.metric_definitions = {
      "ED = |approx - exact|",
      "ER = mismatching pairs / 2^(2n)",
      "MED = sum(ED) / 2^(2n)",
      "NMED = MED / (2^n - 1)^2",
      "MRED = mean(ED / exact) over pairs with exact != 0",
      "MRED(approx denominator) = mean(ED / approx) over pairs with approx != 0",
  };
  for (const auto& n : mul3x3_2_row_notes()) p.notes.push_back(n.text);
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) {
      const auto eq = eval_expressions_331(a, b);
      const auto tab = mul3x3_1(a, b);
      if (eq != tab)
        p.notes.push_back("published sum-of-products equations give " + std::to_string(eq) +
                          " for mul3x3_1(" + std::to_string(a) + "," + std::to_string(b) +
                          "), table value is " + std::to_string(tab));
    }
  return p;
}

std::string to_json(const MetricsDocument& doc) {
  ojson j;
  j["provenance"] = provenance_json(doc.provenance);
  ojson reps = ojson::array();
  for (const auto& r : doc.reports) reps.push_back(report_json(r));
  j["reports"] = std::move(reps);
  return j.dump(2) + "\n";
}

MetricsDocument metrics_from_json(const std::string& text) {
  try {
    const ojson j = ojson::parse(text);
    MetricsDocument doc;
    doc.provenance = provenance_from(j.at("provenance"));
    for (const auto& r : j.at("reports")) doc.reports.push_back(report_from(r));
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: invalid JSON: ") + e.what());
  }
}

std::string to_csv(const MetricsDocument& doc) {
  std::ostringstream os;
  os << "# tool_version: " << doc.provenance.tool_version << '\n';
  os << "# index_map: " << doc.provenance.index_map << '\n';
  for (const auto& d : doc.provenance.metric_definitions) os << "# metric_definition: " << d << '\n';
  for (const auto& n : doc.provenance.notes) os << "# note: " << n << '\n';
  os << kCsvHeader << '\n';
  for (const auto& r : doc.reports) {
    std::string hist;
    for (const auto& [ed, c] : r.ed_histogram) {
      if (!hist.empty()) hist += ';';
      hist += std::to_string(ed) + ':' + std::to_string(c);
    }
    os << csv_field(r.model) << ',' << r.width << ',' << r.pair_count << ',' << r.mismatch_count << ','
       << r.ed_sum << ',' << r.max_ed << ',' << fmt_double(r.er) << ',' << fmt_double(r.med) << ','
       << fmt_double(r.nmed) << ',' << fmt_double(r.mred) << ',' << fmt_double(r.mred_approx_denominator)
       << ',' << hist << '\n';
  }
  return os.str();
}

MetricsDocument metrics_from_csv(const std::string& text) {
  MetricsDocument doc;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  auto take = [](const std::string& l, const std::string& key, std::string& out) {
    if (l.rfind(key, 0) != 0) return false;
    out = l.substr(key.size());
    return true;
  };
  while (std::getline(is, line)) {
    if (!header_seen && line.rfind("# ", 0) == 0) {
      std::string v;
      if (take(line, "# tool_version: ", v)) doc.provenance.tool_version = v;
      else if (take(line, "# index_map: ", v)) doc.provenance.index_map = v;
      else if (take(line, "# metric_definition: ", v)) doc.provenance.metric_definitions.push_back(v);
      else if (take(line, "# note: ", v)) doc.provenance.notes.push_back(v);
      else throw FormatError("report: unknown CSV comment `" + line + "`");
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw FormatError("report: unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw FormatError("report: CSV row has " + std::to_string(f.size()) + " fields");
    ErrorReport r;
    r.model = f[0];
    r.width = static_cast<unsigned>(parse_u64(f[1]));
    r.pair_count = parse_u64(f[2]);
    r.mismatch_count = parse_u64(f[3]);
    r.ed_sum = parse_u64(f[4]);
    r.max_ed = parse_u64(f[5]);
    r.er = parse_double(f[6]);
    r.med = parse_double(f[7]);
    r.nmed = parse_double(f[8]);
    r.mred = parse_double(f[9]);
    r.mred_approx_denominator = parse_double(f[10]);
    std::istringstream hs(f[11]);
    std::string item;
    while (std::getline(hs, item, ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw FormatError("report: bad histogram item `" + item + "`");
      r.ed_histogram[parse_u64(item.substr(0, colon))] = parse_u64(item.substr(colon + 1));
    }
    doc.reports.push_back(std::move(r));
  }
  if (!header_seen) throw FormatError("report: missing CSV header");
  return doc;
}

std::string render(const MetricsDocument& doc, ReportFormat format) {
  return format == ReportFormat::Json ? to_json(doc) : to_csv(doc);
}

void emit_report(const MetricsDocument& doc, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("report: cannot open " + path.string() + " for writing");
  os << render(doc, format);
  if (!os) throw FormatError("report: write failed for " + path.string());
}

std::string to_json(const ReconstructionReport& rep, const Provenance& provenance) {
  ojson j;
  j["provenance"] = provenance_json(provenance);
  ojson pub = ojson::array();
  for (const auto& p : published_8x8_accuracy()) {
    ojson e;
    e["name"] = p.name;
    e["er_pct"] = p.er_pct;
    e["med"] = p.med;
    e["nmed_pct"] = p.nmed_pct;
    e["mred_pct"] = p.mred_pct;
    pub.push_back(std::move(e));
  }
  j["published"] = std::move(pub);

  ojson defaults = ojson::array();
  const auto& published = published_8x8_accuracy();
  for (std::size_t i = 0; i < rep.default_variants.size(); ++i) {
    const auto& r = rep.default_variants[i];
    ojson e = report_json(r);
    if (i < published.size()) {
      e["delta_er_pp"] = 100.0 * r.er - published[i].er_pct;
      e["delta_med"] = r.med - published[i].med;
      e["delta_med_rel"] = (r.med - published[i].med) / published[i].med;
      e["delta_mred_pp"] = 100.0 * r.mred - published[i].mred_pct;
    }
    defaults.push_back(std::move(e));
  }
  j["default_map_variants"] = std::move(defaults);

  ojson hyps = ojson::array();
  for (const auto& h : rep.hypotheses) {
    ojson e;
    e["label"] = h.label;
    e["widths_low_to_high"] = h.widths_low_to_high;
    e["sub_model"] = h.sub_model;
    e["pruned"] = h.pruned ? "(A" + std::string(segment_name(h.pruned_a)) + ",B" +
                                 std::string(segment_name(h.pruned_b)) + ")"
                           : std::string("none");
    e["er_pct"] = 100.0 * h.report.er;
    e["med"] = h.report.med;
    e["nmed_pct"] = 100.0 * h.report.nmed;
    e["mred_pct"] = 100.0 * h.report.mred;
    e["mred_approx_denominator_pct"] = 100.0 * h.report.mred_approx_denominator;
    hyps.push_back(std::move(e));
  }
  j["hypotheses"] = std::move(hyps);

  ojson matches = ojson::array();
  for (const auto& m : rep.matches) {
    ojson e;
    e["target"] = m.target;
    e["closest"] = rep.hypotheses.at(m.best_index).label;
    e["distance"] = m.distance;
    e["default_map_distance"] = m.default_distance;
    matches.push_back(std::move(e));
  }
  j["closest_matches"] = std::move(matches);
  return j.dump(2) + "\n";
}

}  // namespace approxmul
