import logging
import logging.config

config = {
    'version': 1,
    'formatters': {
        'precise': {
            'format': '%(asctime)s | %(name)-16s | %(levelname)-8s | '
                      '%(message)s'
        }
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'precise',
            'level': 'WARNING',
            'stream': 'ext://sys.stderr'
        },
    },
    'root': {
        'level': logging.DEBUG,
        'handlers': ['console']
    }
}


def set_up_logging(level='WARNING', log_file=None):
    """Configure the logging module.

    Diagnostics always go to stderr, so that stdout only carries data.

    :param str|int level: level of the console handler
    :param str|None log_file: if given, also log everything to this file,
        rotated every 500 kB
    """
    settings = dict(config)
    settings['handlers'] = dict(config['handlers'])
    settings['handlers']['console'] = dict(config['handlers']['console'],
                                           level=level)
    settings['root'] = dict(config['root'])
    if log_file is not None:
        settings['handlers']['file'] = {
            'class': 'logging.handlers.RotatingFileHandler',
            'formatter': 'precise',
            'filename': log_file,
            'maxBytes': 500000,
            'backupCount': 5
        }
        settings['root']['handlers'] = ['console', 'file']
    logging.config.dictConfig(settings)
    for module_name in get_modules():
        # Re-enable loggers created before configuration
        logging.getLogger(module_name).disabled = False
    logging.captureWarnings(True)
    logging.getLogger('Logger').debug('Set up logging')


def get_modules():
    """Get known modules that log messages.

    :return: list of logger names
    """
    return ['Main', 'Logger', 'Manifold', 'Frechet', 'Shooting',
            'MultipleShooting', 'Leapfrog', 'Applications', 'Experiments',
            'IO', 'py.warnings']
