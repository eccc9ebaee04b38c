#include "qmlab/experiments.hpp"

int main(int argc, char** argv) { return qmlab::cli_main(argc, argv); }
