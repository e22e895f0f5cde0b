#include "carseq/cli.hpp"

int main(int argc, char** argv) { return carseq::cli::dispatch(argc, argv); }
