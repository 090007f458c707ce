// SPDX-License-Identifier: Apache-2.0
#include "ctap/cli.hpp"

int main(int argc, char** argv) { return ctap::cli::run(argc, argv); }
