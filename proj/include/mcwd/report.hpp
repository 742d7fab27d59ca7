#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace mcwd {

using json = nlohmann::ordered_json;

struct Certificate {
  std::string name;
  long index = 0;
  std::string lhs;  // exponent or value, decimal
  std::string rhs;
  bool pass = false;
  std::string note;
};

struct CertificateReport {
  std::vector<Certificate> certs;
  json summaries = json::object();

  void add(Certificate c) { certs.push_back(std::move(c)); }
  void merge(const CertificateReport& o);
  size_t failures() const;
  bool all_pass() const { return failures() == 0; }
  json to_json() const;  // array of {name,index,lhs_exponent,rhs_exponent,pass}
};

}  // namespace mcwd
