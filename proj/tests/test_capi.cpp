// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "recurlab/recurlab.h"

TEST_CASE("natset handles") {
  rl_natset* s = nullptr;
  REQUIRE(rl_natset_materialize("{\"multiples\":3}", 10, &s) == RL_OK);
  CHECK(rl_natset_size(s) == 4);
  CHECK(rl_natset_horizon(s) == 10);
  CHECK(rl_natset_contains(s, 9) == 1);
  CHECK(rl_natset_contains(s, 8) == 0);
  uint64_t buf[8];
  size_t n = 0;
  REQUIRE(rl_natset_elements(s, buf, 8, &n) == RL_OK);
  CHECK(n == 4);
  CHECK(buf[3] == 9);

  char* js = nullptr;
  REQUIRE(rl_natset_density_json(s, 3, &js) == RL_OK);
  CHECK(std::string(js).find("\"upperBanachEst\"") != std::string::npos);
  rl_free_string(js);

  rl_natset* d = nullptr;
  REQUIRE(rl_natset_difference(s, &d) == RL_OK);
  CHECK(rl_natset_size(d) == 3);
  int found = 0;
  uint64_t start = 0, diff = 0;
  REQUIRE(rl_natset_ap(s, 4, &found, &start, &diff) == RL_OK);
  CHECK(found == 1);
  CHECK(diff == 3);
  rl_natset_free(d);
  rl_natset_free(s);

  const uint64_t raw[] = {5, 1, 3};
  REQUIRE(rl_natset_from_elements(raw, 3, 6, &s) == RL_OK);
  CHECK(rl_natset_contains(s, 3) == 1);
  rl_natset_free(s);
}

TEST_CASE("errors carry codes and messages") {
  rl_natset* s = nullptr;
  CHECK(rl_natset_materialize("{\"ip\":[]}", 10, &s) == RL_INVALID_ARGUMENT);
  CHECK(std::strlen(rl_last_error()) > 0);
  CHECK(rl_natset_materialize("{oops", 10, &s) == RL_INVALID_ARGUMENT);
  CHECK(rl_natset_materialize(nullptr, 10, &s) == RL_INVALID_ARGUMENT);
  REQUIRE(rl_natset_materialize("{\"multiples\":2}", 10, &s) == RL_OK);
  CHECK(std::strlen(rl_last_error()) == 0);
  rl_natset_free(s);

  rl_operator* op = nullptr;
  REQUIRE(rl_operator_new("{\"type\":\"identity\",\"dimCap\":2}", &op) == RL_OK);
  double re = 0, im = 0;
  CHECK(rl_auge_lambda(op, 3, "1", &re, &im) == RL_UNSUPPORTED);
  rl_operator_free(op);
}

TEST_CASE("operator handles") {
  rl_operator* op = nullptr;
  REQUIRE(rl_operator_new("{\"type\":\"blockperm\",\"dimCap\":8}", &op) == RL_OK);
  CHECK(rl_operator_dim(op) == 8);
  std::vector<double> x(16, 0.0), y(16, 0.0);
  x[2 * 3] = 1.0;  // e_4
  REQUIRE(rl_operator_apply(op, x.data(), 8, y.data()) == RL_OK);
  CHECK(y[2 * 2] == 1.0);  // e_3
  REQUIRE(rl_operator_power(op, "1000000000000000000000", x.data(), 8, y.data()) == RL_OK);
  CHECK(y[2 * 3] == 1.0);  // even power fixes the 2-cycle
  CHECK(rl_operator_power(op, "-1", x.data(), 8, y.data()) == RL_INVALID_ARGUMENT);
  CHECK(rl_operator_apply(op, x.data(), 7, y.data()) == RL_INVALID_ARGUMENT);

  size_t rank = 0;
  REQUIRE(rl_operator_krylov_rank(op, x.data(), 8, 5, 1e-9, &rank) == RL_OK);
  CHECK(rank == 2);
  rl_natset* rs = nullptr;
  REQUIRE(rl_operator_return_set(op, x.data(), 8, 0.5, 10, &rs) == RL_OK);
  CHECK(rl_natset_size(rs) == 6);
  rl_natset_free(rs);
  char* desc = nullptr;
  REQUIRE(rl_operator_descriptor(op, &desc) == RL_OK);
  CHECK(std::string(desc).find("blockperm") != std::string::npos);
  rl_free_string(desc);
  rl_operator_free(op);
}

TEST_CASE("auge queries") {
  rl_operator* op = nullptr;
  REQUIRE(rl_operator_new("{\"type\":\"auge\",\"foldN\":1,\"levels\":12}", &op) == RL_OK);
  double re = 0, im = 0;
  REQUIRE(rl_auge_lambda(op, 3, "64", &re, &im) == RL_OK);
  CHECK(re == 0.0);
  CHECK(im == 0.0);
  REQUIRE(rl_auge_lambda(op, 3, "1", &re, &im) == RL_OK);
  CHECK(re == 1.0);
  CHECK(rl_auge_lambda(op, 2, "1", &re, &im) == RL_OUT_OF_RANGE);
  char* js = nullptr;
  REQUIRE(rl_auge_nonrecurrence(op, 1000, &js) == RL_OK);
  CHECK(std::string(js).find("minOverN") != std::string::npos);
  rl_free_string(js);
  rl_operator_free(op);
}

TEST_CASE("config validation and runs") {
  char* diags = nullptr;
  CHECK(rl_config_validate("{\"schema\":1,\"kind\":\"families\",\"params\":{\"set\":{\"multiples\":3},"
                           "\"horizon\":10,\"window\":30}}",
                           &diags) == RL_CONFIG);
  CHECK(std::string(diags).find("window exceeds horizon") != std::string::npos);
  rl_free_string(diags);

  const char* cfg =
      "{\"schema\":1,\"kind\":\"families\",\"params\":{\"set\":{\"multiples\":3},\"horizon\":99,\"window\":30}}";
  REQUIRE(rl_config_validate(cfg, &diags) == RL_OK);
  rl_free_string(diags);
  char* rec = nullptr;
  const std::string dir = std::string(RECURLAB_TEST_TMP) + "/capi_run";
  REQUIRE(rl_experiment_run(cfg, dir.c_str(), &rec) == RL_OK);
  CHECK(std::string(rec).find("\"status\":\"ok\"") != std::string::npos);
  rl_free_string(rec);
  CHECK(rl_experiment_run("{\"schema\":1}", dir.c_str(), &rec) == RL_CONFIG);
}
