#include "app.hpp"

int main(int argc, char** argv) { return orlicz::cli::run(argc, argv); }
