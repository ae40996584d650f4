"""ColdGAN model assembly, losses and adversarial training.

Submodules are imported directly (``coldgan.gan.model``, ``coldgan.gan.losses``,
``coldgan.gan.trainer``); the trainer depends on the evaluation package, which
in turn depends on the model module.
"""
