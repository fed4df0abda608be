#include "aoi/experiments.hpp"

int main(int argc, char** argv) { return aoi::run_cli(argc, argv); }
