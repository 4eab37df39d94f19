#include "posmnl/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace posmnl {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::runtime_error(context + ": " + what);
}

double number_field(const ordered_json& j, const std::string& path, const std::string& context) {
  if (!j.is_number()) fail(context, path + " must be a number");
  return j.get<double>();
}

std::vector<double> number_array(const ordered_json& j, const std::string& path,
                                 const std::string& context) {
  if (!j.is_array()) fail(context, path + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_field(j[i], path + "[" + std::to_string(i + 1) + "]", context));
  }
  return out;
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  ordered_json j;
  j["name"] = instance.name();
  j["N"] = instance.num_products();
  j["K"] = instance.num_positions();
  j["revenues"] = instance.revenues();
  ordered_json model;
  if (const auto* m = instance.multiplicative()) {
    model["type"] = "multiplicative";
    model["v"] = m->v;
    model["theta"] = m->theta;
  } else {
    const auto& g = *instance.general();
    model["type"] = "general";
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < instance.num_products(); ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < instance.num_positions(); ++k) row.push_back(g.attractions(i, k));
      rows.push_back(std::move(row));
    }
    model["V"] = std::move(rows);
  }
  j["model"] = std::move(model);
  return j.dump(2) + "\n";
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(instance);
  if (!out) throw std::runtime_error("failed writing " + path);
}

Instance instance_from_json(const std::string& text, const std::string& context) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    fail(context, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail(context, "top level must be an object");
  for (const char* key : {"name", "N", "K", "revenues", "model"}) {
    if (!j.contains(key)) fail(context, std::string("missing field \"") + key + "\"");
  }
  if (!j["name"].is_string()) fail(context, "name must be a string");
  const std::string name = j["name"].get<std::string>();
  if (!j["N"].is_number_integer()) fail(context, "N must be an integer");
  if (!j["K"].is_number_integer()) fail(context, "K must be an integer");
  const int n = j["N"].get<int>();
  const int k = j["K"].get<int>();
  if (n < 1) fail(context, "N must be at least 1");
  if (k < 1) fail(context, "K must be at least 1");
  std::vector<double> revenues = number_array(j["revenues"], "revenues", context);
  if (static_cast<int>(revenues.size()) != n) {
    fail(context, "revenues has " + std::to_string(revenues.size()) + " entries, expected N=" +
                      std::to_string(n));
  }
  const auto& model = j["model"];
  if (!model.is_object()) fail(context, "model must be an object");
  if (!model.contains("type") || !model["type"].is_string()) {
    fail(context, "model.type must be a string");
  }
  const std::string type = model["type"].get<std::string>();
  try {
    if (type == "multiplicative") {
      for (const char* key : {"v", "theta"}) {
        if (!model.contains(key)) fail(context, std::string("missing field \"model.") + key + "\"");
      }
      MultiplicativeModel m;
      m.v = number_array(model["v"], "model.v", context);
      m.theta = number_array(model["theta"], "model.theta", context);
      if (static_cast<int>(m.theta.size()) != k) {
        fail(context, "model.theta has " + std::to_string(m.theta.size()) +
                          " entries, expected K=" + std::to_string(k));
      }
      return Instance(name, std::move(revenues), std::move(m), k);
    }
    if (type == "general") {
      if (!model.contains("V")) fail(context, "missing field \"model.V\"");
      const auto& rows = model["V"];
      if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        fail(context, "model.V must be an array of N=" + std::to_string(n) + " rows");
      }
      Grid<double> v(n, k);
      for (int i = 0; i < n; ++i) {
        const std::string path = "model.V[" + std::to_string(i + 1) + "]";
        std::vector<double> row = number_array(rows[i], path, context);
        if (static_cast<int>(row.size()) != k) {
          fail(context, path + " has " + std::to_string(row.size()) + " entries, expected K=" +
                            std::to_string(k));
        }
        for (int c = 0; c < k; ++c) v(i, c) = row[c];
      }
      return Instance(name, std::move(revenues), GeneralModel{std::move(v)});
    }
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    fail(context, msg.rfind("revenues", 0) == 0 ? msg : "model." + msg);
  }
  fail(context, "model.type must be \"multiplicative\" or \"general\", got \"" + type + "\"");
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str(), path);
}

}  // namespace posmnl
