#pragma once

// JSON instance files. A file holds exactly one of
//   {"signal":  [[re, im], ...]}
//   {"pairing": {"scale": [re, im], "pairs": [[[re, im], [re, im]], ...]}, "anchor": [re, im]}
//   {"pp":      [u_1, ..., u_N]}
// plus an optional "id" string.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fprlab/error.hpp"
#include "fprlab/hardness.hpp"
#include "fprlab/signal.hpp"
#include "fprlab/ztransform.hpp"

namespace fprlab::io {

using nlohmann::json;

struct SignalInstance {
  ComplexSignal signal;
};

struct PairingInstance {
  ZeroPairing pairing;
  cplx anchor;
};

struct PPInstanceFile {
  PPInstance pp;
};

struct InstanceFile {
  std::string id;
  std::variant<SignalInstance, PairingInstance, PPInstanceFile> content;

  const char* kind() const noexcept {
    switch (content.index()) {
      case 0: return "signal";
      case 1: return "pairing";
      default: return "pp";
    }
  }
};

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::ParseError, "complex numbers must be [re, im] arrays, got " + j.dump());
  }
  const cplx z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorKind::ParseError, "non-finite number in " + j.dump());
  }
  return z;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline InstanceFile parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "instance file must be a JSON object");

  const int kinds = static_cast<int>(doc.contains("signal")) + static_cast<int>(doc.contains("pairing")) +
                    static_cast<int>(doc.contains("pp"));
  if (kinds != 1) {
    throw Error(ErrorKind::ParseError, "exactly one of \"signal\", \"pairing\", \"pp\" must be present");
  }
  InstanceFile out{doc.value("id", std::string{}), SignalInstance{ComplexSignal{cplx{}}}};

  try {
    if (doc.contains("signal")) {
      const auto& arr = doc.at("signal");
      if (!arr.is_array() || arr.empty()) throw Error(ErrorKind::ParseError, "\"signal\" must be a non-empty array");
      std::vector<cplx> x;
      for (const auto& e : arr) x.push_back(complex_from_json(e));
      out.content = SignalInstance{ComplexSignal(std::move(x))};
    } else if (doc.contains("pairing")) {
      const auto& p = doc.at("pairing");
      if (!doc.contains("anchor")) throw Error(ErrorKind::ParseError, "pairing instances need an \"anchor\"");
      ZeroPairing pairing{complex_from_json(p.at("scale")), {}};
      for (const auto& pr : p.at("pairs")) {
        if (!pr.is_array() || pr.size() != 2) throw Error(ErrorKind::ParseError, "each pair must hold two roots");
        const cplx a = complex_from_json(pr[0]);
        const cplx b = complex_from_json(pr[1]);
        const bool unit = a == b && std::abs(std::abs(a) - 1.0) <= kPairTol;
        RootPair rp = std::abs(a) >= std::abs(b) ? RootPair{a, b, unit} : RootPair{b, a, unit};
        pairing.pairs.push_back(rp);
      }
      if (!is_valid_pairing(pairing)) {
        throw Error(ErrorKind::ParseError, "pairs must satisfy gamma * conj(gamma') = 1 and scale must be nonzero");
      }
      out.content = PairingInstance{std::move(pairing), complex_from_json(doc.at("anchor"))};
    } else {
      const auto& arr = doc.at("pp");
      if (!arr.is_array()) throw Error(ErrorKind::ParseError, "\"pp\" must be an array of integers");
      std::vector<std::int64_t> u;
      for (const auto& e : arr) {
        if (!e.is_number_integer()) throw Error(ErrorKind::ParseError, "\"pp\" entries must be integers");
        u.push_back(e.get<std::int64_t>());
      }
      out.content = PPInstanceFile{PPInstance(std::move(u))};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return out;
}

inline InstanceFile read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto inst = parse_instance(ss.str());
  if (inst.id.empty()) inst.id = path;
  return inst;
}

inline json signal_to_json(const ComplexSignal& x) {
  json arr = json::array();
  for (const auto& v : x) arr.push_back(complex_to_json(v));
  return arr;
}

inline json instance_to_json(const InstanceFile& f) {
  json doc;
  if (!f.id.empty()) doc["id"] = f.id;
  if (const auto* s = std::get_if<SignalInstance>(&f.content)) {
    doc["signal"] = signal_to_json(s->signal);
  } else if (const auto* p = std::get_if<PairingInstance>(&f.content)) {
    json pairs = json::array();
    for (const auto& pr : p->pairing.pairs) {
      pairs.push_back(json::array({complex_to_json(pr.gamma), complex_to_json(pr.gamma_recip)}));
    }
    doc["pairing"] = {{"scale", complex_to_json(p->pairing.scale)}, {"pairs", pairs}};
    doc["anchor"] = complex_to_json(p->anchor);
  } else {
    doc["pp"] = std::get<PPInstanceFile>(f.content).pp.values();
  }
  return doc;
}

}  // namespace fprlab::io
