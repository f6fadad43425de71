// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/synthetic.hpp"

int main(int argc, char** argv) { return fheprof::synthetic_runner_main(argc, argv); }
