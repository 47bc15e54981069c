#include "adaframe/cli.hpp"

int main(int argc, char** argv) { return adaframe::cli_main(argc, argv); }
