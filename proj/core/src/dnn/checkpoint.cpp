#include "approxmul/dnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "approxmul/error.hpp"
#include "json.hpp"

namespace approxmul::dnn {

namespace {

using ojson = nlohmann::ordered_json;
constexpr const char* kFormat = "approxmul-checkpoint";
constexpr int kVersion = 1;

static_assert(sizeof(float) == 4);

void put_floats(std::string& blob, const std::vector<float>& v) {
  for (float f : v) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
  }
}

std::vector<float> get_floats(const std::string& blob, std::size_t offset, std::size_t count,
                              const std::filesystem::path& path) {
  if (offset > blob.size() || count > (blob.size() - offset) / 4)
    throw FormatError(path.string() + ": tensor at byte " + std::to_string(offset) + " runs past end of blob");
  std::vector<float> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint32_t u = 0;
    for (int i = 0; i < 4; ++i)
      u |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[offset + 4 * k + i])) << (8 * i);
    v[k] = std::bit_cast<float>(u);
  }
  return v;
}

ojson params_json(const QuantParams& p) { return ojson{{"scale", p.scale}, {"zero_point", p.zero_point}}; }

QuantParams params_from(const ojson& j) {
  const int zp = j.at("zero_point").get<int>();
  if (zp < 0 || zp > 255) throw FormatError("zero_point out of range");
  QuantParams p{j.at("scale").get<double>(), static_cast<std::uint8_t>(zp)};
  if (!(p.scale > 0.0)) throw FormatError("quantization scale must be positive");
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path.string());
  os.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!os) throw FormatError("write failed: " + path.string());
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& manifest) {
  const auto& model = checkpoint.model;
  model.validate();
  const std::string blob_name = manifest.stem().string() + ".bin";

  std::string blob;
  ojson tensors = ojson::array();
  for (const auto& l : model.layers) {
    for (const auto& [suffix, data] : {std::pair{".weight", &l.weight}, std::pair{".bias", &l.bias}}) {
      const auto shape = std::string(suffix) == ".weight" ? l.spec.weight_shape() : std::vector{l.spec.out_channels};
      tensors.push_back(ojson{{"name", l.spec.name + suffix}, {"shape", shape}, {"offset", blob.size()},
                              {"count", data->size()}});
      put_floats(blob, *data);
    }
  }

  ojson j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["topology"] = model.plus ? "lenet+" : "lenet";
  j["blob"] = blob_name;
  j["tensors"] = std::move(tensors);
  if (checkpoint.calibration) {
    const auto& c = *checkpoint.calibration;
    ojson q;
    q["input"] = params_json(c.input);
    q["weights"] = ojson::array();
    for (const auto& p : c.weights) q["weights"].push_back(params_json(p));
    q["outputs"] = ojson::array();
    for (const auto& p : c.outputs) q["outputs"].push_back(params_json(p));
    j["quant"] = std::move(q);
  } else {
    j["quant"] = nullptr;
  }
  const auto& r = model.record;
  j["training"] = ojson{{"epochs", r.epochs},           {"learning_rate", r.learning_rate},
                        {"l2", r.l2},                   {"seed", r.seed},
                        {"train_accuracy", r.train_accuracy}, {"test_accuracy", r.test_accuracy}};

  write_file(manifest.parent_path() / blob_name, blob);
  write_file(manifest, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& manifest) {
  ojson j;
  try {
    j = ojson::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
  try {
    if (j.at("format") != kFormat) throw FormatError(manifest.string() + ": not a checkpoint manifest");
    if (j.at("version").get<int>() != kVersion)
      throw FormatError(manifest.string() + ": unsupported checkpoint version");
    const std::string topo = j.at("topology").get<std::string>();
    if (topo != "lenet" && topo != "lenet+") throw FormatError(manifest.string() + ": unknown topology " + topo);
    const std::string blob_name = j.at("blob").get<std::string>();
    if (std::filesystem::path(blob_name).has_parent_path())
      throw FormatError(manifest.string() + ": blob must sit next to the manifest");
    const std::string blob = read_file(manifest.parent_path() / blob_name);

    Checkpoint cp;
    cp.model.plus = topo == "lenet+";
    const auto specs = lenet_topology(cp.model.plus);
    const auto& tensors = j.at("tensors");
    if (tensors.size() != 2 * specs.size()) throw FormatError(manifest.string() + ": tensor count mismatch");
    std::size_t expect_offset = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      LeNetLayer layer{specs[i], {}, {}};
      for (int part = 0; part < 2; ++part) {
        const auto& t = tensors[2 * i + part];
        const std::string name = specs[i].name + (part == 0 ? ".weight" : ".bias");
        const auto shape = part == 0 ? specs[i].weight_shape() : std::vector{specs[i].out_channels};
        if (t.at("name") != name || t.at("shape").get<std::vector<std::size_t>>() != shape)
          throw FormatError(manifest.string() + ": unexpected tensor " + t.at("name").get<std::string>());
        const auto offset = t.at("offset").get<std::size_t>();
        const auto count = t.at("count").get<std::size_t>();
        if (offset != expect_offset) throw FormatError(manifest.string() + ": tensor " + name + " offset mismatch");
        auto data = get_floats(blob, offset, count, manifest);
        expect_offset += 4 * count;
        (part == 0 ? layer.weight : layer.bias) = std::move(data);
      }
      cp.model.layers.push_back(std::move(layer));
    }
    if (expect_offset != blob.size()) throw FormatError(manifest.string() + ": trailing bytes in blob");
    cp.model.validate();

    const auto& q = j.at("quant");
    if (!q.is_null()) {
      Calibration c;
      c.input = params_from(q.at("input"));
      for (const auto& p : q.at("weights")) c.weights.push_back(params_from(p));
      for (const auto& p : q.at("outputs")) c.outputs.push_back(params_from(p));
      if (c.weights.size() != specs.size() || c.outputs.size() != specs.size())
        throw FormatError(manifest.string() + ": quantization parameter count mismatch");
      cp.calibration = std::move(c);
    }
    const auto& r = j.at("training");
    cp.model.record = {r.at("epochs").get<std::size_t>(),     r.at("learning_rate").get<double>(),
                       r.at("l2").get<double>(),              r.at("seed").get<std::uint64_t>(),
                       r.at("train_accuracy").get<double>(), r.at("test_accuracy").get<double>()};
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
}

}  // namespace approxmul::dnn
